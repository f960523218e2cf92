#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isopar/dense.hpp"
#include "isopar/errors.hpp"
#include "isopar/symmat.hpp"

namespace isopar {

/// Half-width of the excluded band around each blow-up time.
inline constexpr double kBlowUpBand = 1e-3;

enum class JacobiTag { SpaceForm, RankOne };

/// Eigenvalues kappa_i of the normal Jacobi operator along a parallel family.
struct JacobiSpectrum {
    std::vector<double> kappas;
    JacobiTag tag = JacobiTag::SpaceForm;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    /// Multiplicity of kappa2 for rank-one spectra.
    int m = 0;

    static JacobiSpectrum space_form(double c, std::size_t n) {
        if (n == 0) throw RangeError("Jacobi spectrum needs n >= 1");
        return {std::vector<double>(n, c), JacobiTag::SpaceForm, c, c, 0};
    }

    /// diag(kappa1 I_{n-m}, kappa2 I_m), m in {1, 3, 7}.
    static JacobiSpectrum rank_one(double kappa1, double kappa2, int m, std::size_t n) {
        if (m != 1 && m != 3 && m != 7) throw RangeError("rank-one multiplicity must be 1, 3 or 7");
        if (static_cast<std::size_t>(m) >= n) throw RangeError("rank-one spectrum needs n > m");
        if (kappa1 == kappa2) throw RangeError("rank-one spectrum needs two distinct values");
        JacobiSpectrum j{std::vector<double>(n - static_cast<std::size_t>(m), kappa1), JacobiTag::RankOne,
                         kappa1, kappa2, m};
        j.kappas.insert(j.kappas.end(), static_cast<std::size_t>(m), kappa2);
        return j;
    }

    std::size_t size() const noexcept { return kappas.size(); }
    /// Whether index k belongs to the kappa1 block (always true for space forms).
    bool in_first_block(std::size_t k) const { return tag == JacobiTag::SpaceForm || k + m < kappas.size(); }
};

// --- scalar Riccati equation mu' = mu^2 + kappa -----------------------------

namespace detail {

enum class Branch { Cot, Rational, Tanh, Coth, Constant };

struct ScalarSolution {
    Branch branch;
    double s;  // sqrt|kappa|
    double c;  // phase constant
    double mu0;
};

inline ScalarSolution solve_scalar(double kappa, double mu0) {
    if (kappa > 0.0) {
        const double s = std::sqrt(kappa);
        return {Branch::Cot, s, std::atan2(s, mu0) / s, mu0};
    }
    if (kappa == 0.0) return {Branch::Rational, 0.0, 0.0, mu0};
    const double s = std::sqrt(-kappa);
    if (std::abs(mu0) < s) return {Branch::Tanh, s, std::atanh(mu0 / s) / s, mu0};
    if (std::abs(mu0) > s) return {Branch::Coth, s, std::atanh(s / mu0) / s, mu0};
    return {Branch::Constant, s, 0.0, mu0};
}

inline double coth(double x) { return 1.0 / std::tanh(x); }

}  // namespace detail

/// Solution of mu' = mu^2 + kappa, mu(0) = mu0, evaluated at t. Poles are
/// not checked here.
inline double riccati_closed(double kappa, double mu0, double t) {
    const auto sol = detail::solve_scalar(kappa, mu0);
    switch (sol.branch) {
        case detail::Branch::Cot: return sol.s / std::tan(sol.s * (sol.c - t));
        case detail::Branch::Rational: return mu0 / (1.0 - mu0 * t);
        case detail::Branch::Tanh: return sol.s * std::tanh(sol.s * (sol.c - t));
        case detail::Branch::Coth: return sol.s * detail::coth(sol.s * (sol.c - t));
        case detail::Branch::Constant: return mu0;
    }
    return mu0;
}

/// d/dt of riccati_closed, differentiated branch by branch.
inline double riccati_closed_derivative(double kappa, double mu0, double t) {
    const auto sol = detail::solve_scalar(kappa, mu0);
    const double s = sol.s;
    switch (sol.branch) {
        case detail::Branch::Cot: {
            const double sn = std::sin(s * (sol.c - t));
            return s * s / (sn * sn);
        }
        case detail::Branch::Rational: {
            const double d = 1.0 - mu0 * t;
            return mu0 * mu0 / (d * d);
        }
        case detail::Branch::Tanh: {
            const double ch = std::cosh(s * (sol.c - t));
            return -s * s / (ch * ch);
        }
        case detail::Branch::Coth: {
            const double sh = std::sinh(s * (sol.c - t));
            return s * s / (sh * sh);
        }
        case detail::Branch::Constant: return 0.0;
    }
    return 0.0;
}

/// First pole of the solution in each time direction (infinite if none).
inline std::pair<double, double> riccati_poles(double kappa, double mu0) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto sol = detail::solve_scalar(kappa, mu0);
    switch (sol.branch) {
        case detail::Branch::Cot: return {sol.c - std::numbers::pi / sol.s, sol.c};
        case detail::Branch::Rational:
            if (mu0 > 0.0) return {-inf, 1.0 / mu0};
            if (mu0 < 0.0) return {1.0 / mu0, inf};
            return {-inf, inf};
        case detail::Branch::Coth:
            if (sol.c > 0.0) return {-inf, sol.c};
            return {sol.c, inf};
        case detail::Branch::Tanh:
        case detail::Branch::Constant: return {-inf, inf};
    }
    return {-inf, inf};
}

/// Curvature-adapted parallel family: principal curvatures mu_i(t) with
/// mu_i' = mu_i^2 + kappa_i, on the interval around 0 that avoids the first
/// blow-up on either side (minus a band of kBlowUpBand).
class RiccatiFamily {
public:
    RiccatiFamily(JacobiSpectrum jacobi, std::vector<double> mu0) : jacobi_(std::move(jacobi)), mu0_(std::move(mu0)) {
        if (mu0_.size() != jacobi_.size())
            throw RangeError("initial curvature count does not match the Jacobi spectrum");
        lo_pole_ = -std::numeric_limits<double>::infinity();
        hi_pole_ = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < mu0_.size(); ++k) {
            const auto [lo, hi] = riccati_poles(jacobi_.kappas[k], mu0_[k]);
            lo_pole_ = std::max(lo_pole_, lo);
            hi_pole_ = std::min(hi_pole_, hi);
        }
    }

    const JacobiSpectrum& jacobi() const noexcept { return jacobi_; }
    const std::vector<double>& mu0() const noexcept { return mu0_; }
    std::size_t size() const noexcept { return mu0_.size(); }
    /// Nearest blow-up times before and after t = 0.
    std::pair<double, double> blow_up_times() const noexcept { return {lo_pole_, hi_pole_}; }
    std::pair<double, double> domain() const noexcept { return {lo_pole_ + kBlowUpBand, hi_pole_ - kBlowUpBand}; }

    void require_in_domain(double t) const {
        const auto [lo, hi] = domain();
        if (t <= lo) throw BlowUpError("t = " + std::to_string(t) + " is at or past a blow-up", lo_pole_);
        if (t >= hi) throw BlowUpError("t = " + std::to_string(t) + " is at or past a blow-up", hi_pole_);
    }

private:
    JacobiSpectrum jacobi_;
    std::vector<double> mu0_;
    double lo_pole_;
    double hi_pole_;
};

inline std::vector<double> evolve_closed(const RiccatiFamily& fam, double t) {
    fam.require_in_domain(t);
    std::vector<double> mu(fam.size());
    for (std::size_t k = 0; k < mu.size(); ++k) mu[k] = riccati_closed(fam.jacobi().kappas[k], fam.mu0()[k], t);
    return mu;
}

/// mu_i'(t) from the closed forms.
inline std::vector<double> evolve_closed_derivative(const RiccatiFamily& fam, double t) {
    fam.require_in_domain(t);
    std::vector<double> d(fam.size());
    for (std::size_t k = 0; k < d.size(); ++k)
        d[k] = riccati_closed_derivative(fam.jacobi().kappas[k], fam.mu0()[k], t);
    return d;
}

/// Classical fourth-order Runge-Kutta from 0 to t in `steps` equal steps.
inline std::vector<double> evolve_numeric(const RiccatiFamily& fam, double t, std::size_t steps) {
    fam.require_in_domain(t);
    std::vector<double> mu = fam.mu0();
    if (steps == 0) {
        if (t != 0.0) throw RangeError("zero steps can only reach t = 0");
        return mu;
    }
    const double h = t / static_cast<double>(steps);
    for (std::size_t k = 0; k < mu.size(); ++k) {
        const double kappa = fam.jacobi().kappas[k];
        const auto rhs = [kappa](double m) { return m * m + kappa; };
        double y = mu[k];
        for (std::size_t s = 0; s < steps; ++s) {
            const double k1 = rhs(y);
            const double k2 = rhs(y + 0.5 * h * k1);
            const double k3 = rhs(y + 0.5 * h * k2);
            const double k4 = rhs(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!std::isfinite(y)) throw IntegrationError("Runge-Kutta step overflowed");
        }
        mu[k] = y;
    }
    return mu;
}

// --- moments -----------------------------------------------------------------

/// Gamma_ij(t) = tr(S^i R^j) = sum_k mu_k^i kappa_k^j.
inline double gamma_ij(const RiccatiFamily& fam, double t, int i, int j) {
    const std::vector<double> mu = evolve_closed(fam, t);
    double s = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) s += std::pow(mu[k], i) * std::pow(fam.jacobi().kappas[k], j);
    return s;
}

inline double power_sum_q(const RiccatiFamily& fam, double t, int i) { return gamma_ij(fam, t, i, 0); }

/// d/dt Gamma_ij from the differentiated closed forms.
inline double gamma_ij_derivative(const RiccatiFamily& fam, double t, int i, int j) {
    if (i == 0) return 0.0;
    const std::vector<double> mu = evolve_closed(fam, t);
    const std::vector<double> dmu = evolve_closed_derivative(fam, t);
    double s = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k)
        s += i * std::pow(mu[k], i - 1) * dmu[k] * std::pow(fam.jacobi().kappas[k], j);
    return s;
}

/// Power sums of mu over the kappa1 block (Phi) and the kappa2 block (Psi).
inline std::pair<double, double> split_power_sums(const RiccatiFamily& fam, double t, int i) {
    const std::vector<double> mu = evolve_closed(fam, t);
    double phi = 0.0, psi = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) (fam.jacobi().in_first_block(k) ? phi : psi) += std::pow(mu[k], i);
    return {phi, psi};
}

inline double scaled_gap(double lhs, double rhs) { return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)); }

/// Q_{i+1} = Q_i'/i - Gamma_{i-1,1}, i = 1 .. i_max. Residuals are relative to max(1, |Q_{i+1}|).
inline double check_power_sum_recurrence(const RiccatiFamily& fam, std::span<const double> t_samples, int i_max) {
    double worst = 0.0;
    for (double t : t_samples)
        for (int i = 1; i <= i_max; ++i) {
            const double lhs = power_sum_q(fam, t, i + 1);
            const double rhs = gamma_ij_derivative(fam, t, i, 0) / i - gamma_ij(fam, t, i - 1, 1);
            worst = std::max(worst, scaled_gap(lhs, rhs));
        }
    return worst;
}

/// Gamma_{i+1,1} = (1/i)(Gamma_{i1}' - sum_{j<i} tr(S^j R S^{i-1-j} R)) for a
/// parallel R; in the diagonal case the sum is i Gamma_{i-1,2}.
inline double check_gamma_recurrence(const RiccatiFamily& fam, std::span<const double> t_samples, int i_max) {
    double worst = 0.0;
    for (double t : t_samples) {
        const std::vector<double> mu = evolve_closed(fam, t);
        const auto& kap = fam.jacobi().kappas;
        for (int i = 1; i <= i_max; ++i) {
            double trace_sum = 0.0;
            for (int j = 0; j < i; ++j)
                for (std::size_t k = 0; k < mu.size(); ++k)
                    trace_sum += std::pow(mu[k], j) * kap[k] * std::pow(mu[k], i - 1 - j) * kap[k];
            const double lhs = gamma_ij(fam, t, i + 1, 1);
            const double rhs = (gamma_ij_derivative(fam, t, i, 1) - trace_sum) / i;
            worst = std::max(worst, scaled_gap(lhs, rhs));
        }
    }
    return worst;
}

/// H' = |S|^2 + tr R with H = tr S.
inline double check_mean_curvature_riccati(const RiccatiFamily& fam, std::span<const double> t_samples) {
    double worst = 0.0;
    for (double t : t_samples) {
        const double lhs = gamma_ij_derivative(fam, t, 1, 0);
        const double rhs = power_sum_q(fam, t, 2) + gamma_ij(fam, t, 0, 1);
        worst = std::max(worst, scaled_gap(lhs, rhs));
    }
    return worst;
}

/// Phi_i' = i (Phi_{i+1} + kappa1 Phi_{i-1}) and the same for Psi with kappa2.
inline double check_split_recurrences(const RiccatiFamily& fam, std::span<const double> t_samples, int i_max) {
    const JacobiSpectrum& jac = fam.jacobi();
    double worst = 0.0;
    for (double t : t_samples) {
        const std::vector<double> mu = evolve_closed(fam, t);
        const std::vector<double> dmu = evolve_closed_derivative(fam, t);
        for (int i = 1; i <= i_max; ++i) {
            double dphi = 0.0, dpsi = 0.0;
            for (std::size_t k = 0; k < mu.size(); ++k)
                (jac.in_first_block(k) ? dphi : dpsi) += i * std::pow(mu[k], i - 1) * dmu[k];
            const auto [phi_up, psi_up] = split_power_sums(fam, t, i + 1);
            const auto [phi_dn, psi_dn] = split_power_sums(fam, t, i - 1);
            worst = std::max(worst, scaled_gap(dphi, i * (phi_up + jac.kappa1 * phi_dn)));
            worst = std::max(worst, scaled_gap(dpsi, i * (psi_up + jac.kappa2 * psi_dn)));
        }
    }
    return worst;
}

namespace detail {

/// Polynomial in mu, coefficients in increasing degree.
using Poly = std::vector<double>;

/// d/dt p(mu) = p'(mu) (mu^2 + kappa) along a solution.
inline Poly riccati_derivative(const Poly& p, double kappa) {
    Poly out(p.size() + 1, 0.0);
    for (std::size_t d = 1; d < p.size(); ++d) {
        const double c = static_cast<double>(d) * p[d];
        out[d + 1] += c;
        out[d - 1] += c * kappa;
    }
    while (out.size() > 1 && out.back() == 0.0) out.pop_back();
    return out;
}

inline double eval_poly(const Poly& p, double x) {
    double v = 0.0;
    for (std::size_t d = p.size(); d-- > 0;) v = v * x + p[d];
    return v;
}

}  // namespace detail

/// order-th time derivative of Gamma_ij(t), computed exactly from the ODE.
inline double gamma_ij_jet(const RiccatiFamily& fam, double t, int i, int j, int order) {
    const std::vector<double> mu = evolve_closed(fam, t);
    double s = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
        const double kappa = fam.jacobi().kappas[k];
        detail::Poly p(static_cast<std::size_t>(i) + 1, 0.0);
        p[static_cast<std::size_t>(i)] = 1.0;
        for (int d = 0; d < order; ++d) p = detail::riccati_derivative(p, kappa);
        s += detail::eval_poly(p, mu[k]) * std::pow(kappa, j);
    }
    return s;
}

struct PropagationResult {
    double q4_chain = 0.0;
    double q4_direct = 0.0;
    double q5_chain = 0.0;
    double q5_direct = 0.0;
    /// Largest relative discrepancy between chain and direct values.
    double max_discrepancy = 0.0;
};

/// Q4 and Q5 from Q1..Q3 through the chain
///   Gamma11 = Q2'/2 - Q3,  Gamma21 = Gamma11' - tr R^2,  Q4 = Q3'/3 - Gamma21,
///   Gamma31 = Gamma21'/2 - Gamma12,  Q5 = Q4'/4 - Gamma31,
/// against the direct power sums.
inline PropagationResult propagate_q4_q5(const RiccatiFamily& fam, double t) {
    const auto q = [&](int i, int order) { return gamma_ij_jet(fam, t, i, 0, order); };
    const double tr_r2 = gamma_ij(fam, t, 0, 2);
    const double gamma12 = gamma_ij(fam, t, 1, 2);

    // Jets of the chain quantities; only derivatives of Q2, Q3 enter.
    const double g11_d1 = 0.5 * q(2, 2) - q(3, 1);
    const double g11_d2 = 0.5 * q(2, 3) - q(3, 2);
    const double g21 = g11_d1 - tr_r2;
    const double g21_d1 = g11_d2;
    const double q4 = q(3, 1) / 3.0 - g21;
    const double q4_d1 = q(3, 2) / 3.0 - g21_d1;
    const double g31 = 0.5 * g21_d1 - gamma12;
    const double q5 = 0.25 * q4_d1 - g31;

    PropagationResult r;
    r.q4_chain = q4;
    r.q4_direct = power_sum_q(fam, t, 4);
    r.q5_chain = q5;
    r.q5_direct = power_sum_q(fam, t, 5);
    r.max_discrepancy = std::max(scaled_gap(r.q4_direct, r.q4_chain), scaled_gap(r.q5_direct, r.q5_chain));
    return r;
}

/// mu(t) recovered from the power sums Q_1(t), ..., Q_n(t).
inline RecoveredSpectrum moment_to_spectrum_evolution(const RiccatiFamily& fam, double t) {
    const std::size_t n = fam.size();
    std::vector<double> q;
    for (std::size_t i = 1; i <= n; ++i) q.push_back(power_sum_q(fam, t, static_cast<int>(i)));
    return spectrum_from_moments(q, n);
}

struct TrajectoryRow {
    double t = 0.0;
    std::vector<double> mu;
    std::vector<double> q;
    double mean_curvature = 0.0;
};

/// Samples of (t, mu, Q_1..Q_k, H) on [t0, t1]. Stops at the first sample
/// outside the domain; `blow_up` then holds the offending pole.
struct Trajectory {
    std::vector<TrajectoryRow> rows;
    bool complete = true;
    double blow_up = 0.0;
};

inline Trajectory trajectory(const RiccatiFamily& fam, double t0, double t1, std::size_t steps, int k_max) {
    Trajectory out;
    for (std::size_t s = 0; s <= steps; ++s) {
        const double t = steps == 0 ? t0 : t0 + (t1 - t0) * static_cast<double>(s) / static_cast<double>(steps);
        try {
            TrajectoryRow row;
            row.t = t;
            row.mu = evolve_closed(fam, t);
            for (int k = 1; k <= k_max; ++k) row.q.push_back(power_sum(row.mu, static_cast<std::size_t>(k)));
            row.mean_curvature = row.q.empty() ? power_sum(row.mu, 1) : row.q[0];
            out.rows.push_back(std::move(row));
        } catch (const BlowUpError& e) {
            out.complete = false;
            out.blow_up = e.blow_up_time();
            break;
        }
    }
    return out;
}

}  // namespace isopar
