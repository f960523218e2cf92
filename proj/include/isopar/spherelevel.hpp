#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isopar/dense.hpp"
#include "isopar/errors.hpp"
#include "isopar/polyfam.hpp"
#include "isopar/sampling.hpp"
#include "isopar/symmat.hpp"

namespace isopar {

inline constexpr double kFocalBand = 1e-3;
inline constexpr double kUnitTolerance = 1e-12;
inline constexpr double kDerivativeStep = 1e-4;

/// Level hypersurface data of f = F|_{S^{n+1}} at a point x of the unit sphere.
struct SpherePointFrame {
    Vector x;
    double f = 0.0;
    /// Spherical gradient DF - g f x.
    Vector grad;
    double grad_norm = 0.0;
    Vector nu;
    /// Row i is e_i; rows span the orthogonal complement of {x, nu}.
    Matrix basis;
    /// Spherical Hessian of f in the frame (e_1, ..., e_n, nu).
    SymmetricMatrix hessian_f{1};
    /// Shape operator -H_f/|grad f| on span(e_1, ..., e_n).
    SymmetricMatrix shape{1};

    std::size_t n() const noexcept { return basis.rows(); }
};

namespace detail {

/// Orthonormal completion of `fixed` (orthonormal rows) inside R^dim. At each
/// step the standard basis vector with the largest component outside the
/// current span is taken, so the two weakest candidates are the ones left out.
inline Matrix complete_basis(const std::vector<Vector>& fixed, std::size_t dim) {
    std::vector<Vector> span(fixed);
    std::vector<bool> used(dim, false);
    const std::size_t want = dim - fixed.size();
    Matrix out(want, dim);
    for (std::size_t k = 0; k < want; ++k) {
        std::size_t best = dim;
        double best_norm = -1.0;
        Vector best_vec;
        for (std::size_t c = 0; c < dim; ++c) {
            if (used[c]) continue;
            Vector v = unit_vector(dim, c);
            for (int pass = 0; pass < 2; ++pass)
                for (const Vector& q : span) v = axpy(v, -dot(v, q), q);
            const double nv = norm(v);
            if (nv > best_norm) {
                best_norm = nv;
                best = c;
                best_vec = std::move(v);
            }
        }
        if (best_norm < 1e-8) throw ConstructionError("tangent basis completion degenerated");
        used[best] = true;
        best_vec = scaled(best_vec, 1.0 / best_norm);
        for (std::size_t j = 0; j < dim; ++j) out(k, j) = best_vec[j];
        span.push_back(std::move(best_vec));
    }
    return out;
}

/// E^t H E for the columns E given as rows of `frame`.
inline Matrix restrict_form(const Matrix& h, const Matrix& frame) {
    return frame * h * frame.transpose();
}

}  // namespace detail

inline SpherePointFrame frame_at(const IsoPolynomial& p, std::span<const double> x) {
    const double len = norm(x);
    if (std::abs(len - 1.0) > kUnitTolerance)
        throw RangeError("frame point must lie on the unit sphere (|x| = " + std::to_string(len) + ")");
    SpherePointFrame fr;
    fr.x.assign(x.begin(), x.end());
    fr.f = p.eval(x);
    if (std::abs(fr.f) > 1.0 - kFocalBand)
        throw FocalPointError("point is within the focal band (f = " + std::to_string(fr.f) + ")", fr.f);
    const double g = p.degree();
    fr.grad = axpy(p.grad(x), -g * fr.f, x);
    fr.grad_norm = norm(fr.grad);
    fr.nu = scaled(fr.grad, 1.0 / fr.grad_norm);
    fr.basis = detail::complete_basis({fr.x, fr.nu}, x.size());

    const std::size_t n = fr.basis.rows();
    Matrix frame(n + 1, x.size());
    frame.set_block(0, 0, fr.basis);
    for (std::size_t j = 0; j < x.size(); ++j) frame(n, j) = fr.nu[j];
    Matrix hf = detail::restrict_form(p.hessian(x).matrix(), frame);
    for (std::size_t i = 0; i <= n; ++i) hf(i, i) -= g * fr.f;
    fr.hessian_f = SymmetricMatrix(hf, SymmetryPolicy::Symmetrize);

    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) = -hf(i, j) / fr.grad_norm;
    fr.shape = SymmetricMatrix(s, SymmetryPolicy::Symmetrize);
    return fr;
}

struct FrameResiduals {
    double unit = 0.0;
    double grad_orthogonal = 0.0;
    double transnormal = 0.0;
    /// max_i |H_f(e_i, nu)|
    double mixed = 0.0;
    /// H_f(nu, nu) - b'(f)/2
    double normal_normal = 0.0;
    double basis_orthonormal = 0.0;

    double max() const {
        return std::max({std::abs(unit), std::abs(grad_orthogonal), std::abs(transnormal), mixed,
                         std::abs(normal_normal), basis_orthonormal});
    }
};

inline FrameResiduals frame_residuals(const IsoPolynomial& p, const SpherePointFrame& fr) {
    const TransnormalProfile prof = TransnormalProfile::of(p);
    const std::size_t n = fr.n();
    FrameResiduals r;
    r.unit = norm(fr.x) - 1.0;
    r.grad_orthogonal = dot(fr.grad, fr.x);
    r.transnormal = fr.grad_norm * fr.grad_norm - prof.b(fr.f);
    for (std::size_t i = 0; i < n; ++i) r.mixed = std::max(r.mixed, std::abs(fr.hessian_f(i, n)));
    r.normal_normal = fr.hessian_f(n, n) - 0.5 * prof.b_prime(fr.f);
    const Matrix gram = fr.basis * fr.basis.transpose() - Matrix::identity(n);
    r.basis_orthonormal = gram.max_abs_entry();
    for (std::size_t i = 0; i < n; ++i) {
        r.basis_orthonormal = std::max(r.basis_orthonormal, std::abs(dot(fr.basis.row(i), fr.x)));
        r.basis_orthonormal = std::max(r.basis_orthonormal, std::abs(dot(fr.basis.row(i), fr.nu)));
    }
    return r;
}

inline Spectrum shape_spectrum(const SpherePointFrame& fr) { return eigensolve(fr.shape); }

/// (|grad f|^2 - b(f), Delta f - a(f)) on the unit sphere.
inline std::pair<double, double> transnormal_residuals(const IsoPolynomial& p, std::span<const double> x) {
    const SpherePointFrame fr = frame_at(p, x);
    const TransnormalProfile prof = TransnormalProfile::of(p);
    return {fr.grad_norm * fr.grad_norm - prof.b(fr.f), fr.hessian_f.trace() - prof.a(fr.f)};
}

/// Principal curvatures cot(tau + (i-1) pi/g), t = cos(g tau), multiplicities
/// alternating m1, m2.
struct MunznerSpectrum {
    int g = 0;
    int m1 = 0;
    int m2 = 0;
    double t = 0.0;
    double tau = 0.0;
    std::vector<double> curvatures;
    std::vector<int> multiplicities;

    static MunznerSpectrum at(int g, int m1, int m2, double t) {
        if (g < 1) throw RangeError("g must be positive");
        if (!(t > -1.0 && t < 1.0)) throw RangeError("level must lie in (-1, 1)");
        MunznerSpectrum s{g, m1, m2, t, std::acos(t) / g, {}, {}};
        for (int i = 0; i < g; ++i) {
            s.curvatures.push_back(1.0 / std::tan(s.tau + i * std::numbers::pi / g));
            s.multiplicities.push_back(i % 2 == 0 ? m1 : m2);
        }
        return s;
    }

    std::vector<double> expanded() const {
        std::vector<double> v;
        for (std::size_t i = 0; i < curvatures.size(); ++i)
            v.insert(v.end(), static_cast<std::size_t>(multiplicities[i]), curvatures[i]);
        std::sort(v.begin(), v.end(), std::greater<>());
        return v;
    }

    double power_sum(int k) const {
        double s = 0.0;
        for (std::size_t i = 0; i < curvatures.size(); ++i)
            s += multiplicities[i] * std::pow(curvatures[i], k);
        return s;
    }
};

struct MunznerReport {
    bool match = false;
    /// The observed spectrum matches the negated prediction instead.
    bool orientation_flipped = false;
    double max_error = 0.0;
    std::vector<double> expected;
    std::vector<double> observed;
};

namespace detail {

inline double multiset_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace detail

inline MunznerReport munzner_check(const SpherePointFrame& fr, int g, int m1, int m2,
                                   double tol = kClusterTolerance) {
    MunznerReport rep;
    rep.expected = MunznerSpectrum::at(g, m1, m2, fr.f).expanded();
    rep.observed = shape_spectrum(fr).values;
    rep.max_error = detail::multiset_distance(rep.expected, rep.observed);
    rep.match = rep.max_error <= tol;
    if (!rep.match) {
        std::vector<double> flipped(rep.expected.rbegin(), rep.expected.rend());
        for (double& v : flipped) v = -v;
        rep.orientation_flipped = detail::multiset_distance(flipped, rep.observed) <= tol;
    }
    return rep;
}

/// Spectrum of D^2F at a regular sphere point against
/// {-g sqrt(1-f^2) mu_i + g f} together with {g(g-1), -g(g-1)}.
inline double ambient_hessian_spectrum_residual(const IsoPolynomial& p, const SpherePointFrame& fr) {
    const double g = p.degree();
    std::vector<double> predicted;
    for (double mu : shape_spectrum(fr).values)
        predicted.push_back(-g * std::sqrt(1.0 - fr.f * fr.f) * mu + g * fr.f);
    predicted.push_back(g * (g - 1.0));
    predicted.push_back(-g * (g - 1.0));
    std::sort(predicted.begin(), predicted.end(), std::greater<>());
    return detail::multiset_distance(predicted, eigensolve(p.hessian(fr.x)).values);
}

// --- level projection --------------------------------------------------------

struct LevelProjection {
    Vector y;
    /// Arc length along the normal great circle.
    double s = 0.0;
    int iterations = 0;
    /// max |F(gamma(s')) - cos(g(tau0 - s'))| over intermediate s'.
    double path_residual = 0.0;
};

/// Moves x along gamma(s) = cos(s) x + sin(s) nu until F = t_target.
inline LevelProjection level_project(const IsoPolynomial& p, std::span<const double> x, double t_target,
                                     double tol = 1e-10) {
    if (std::abs(t_target) > 1.0 - kFocalBand)
        throw FocalPointError("target level is within the focal band", t_target);
    const SpherePointFrame fr = frame_at(p, x);
    const double g = p.degree();
    const double tau0 = std::acos(fr.f) / g;
    const auto gamma = [&](double s) {
        Vector y = scaled(fr.x, std::cos(s));
        return axpy(y, std::sin(s), fr.nu);
    };
    const auto phi = [&](double s) { return p.eval(gamma(s)) - t_target; };

    // On [tau0 - pi/g, tau0] the level runs monotonically from -1 to 1.
    double lo = tau0 - std::numbers::pi / g, hi = tau0;
    double flo = phi(lo), fhi = phi(hi);
    if (flo > 0.0 || fhi < 0.0)
        throw ProjectionError("level " + std::to_string(t_target) + " not bracketed along the normal circle");

    LevelProjection out;
    double s = 0.0;
    double fs = fr.f - t_target;
    for (out.iterations = 0; out.iterations < 200 && std::abs(fs) > tol; ++out.iterations) {
        if (fs < 0.0) lo = s;
        else hi = s;
        const Vector y = gamma(s);
        const Vector dy = axpy(scaled(fr.x, -std::sin(s)), std::cos(s), fr.nu);
        const double slope = dot(p.grad(y), dy);
        double next = slope != 0.0 ? s - fs / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        s = next;
        fs = phi(s);
    }
    if (std::abs(fs) > tol) throw ProjectionError("level projection did not converge");

    out.s = s;
    out.y = normalized(gamma(s));
    for (int i = 1; i <= 20; ++i) {
        const double si = s * i / 20.0;
        out.path_residual =
            std::max(out.path_residual, std::abs(p.eval(gamma(si)) - std::cos(g * (tau0 - si))));
    }
    return out;
}

// --- recurrences in t ------------------------------------------------------

struct DerivativePair {
    double central = 0.0;
    double richardson = 0.0;
};

inline DerivativePair differentiate(const std::function<double(double)>& fn, double t,
                                    double h = kDerivativeStep) {
    const double d1 = (fn(t + h) - fn(t - h)) / (2.0 * h);
    const double d2 = (fn(t + h / 2) - fn(t - h / 2)) / h;
    return {d1, (4.0 * d2 - d1) / 3.0};
}

/// Evenly spaced samples in (-0.9, 0.9).
inline std::vector<double> default_t_samples(std::size_t count = 20) {
    std::vector<double> t;
    for (std::size_t i = 0; i < count; ++i) t.push_back(-0.9 + 1.8 * (i + 0.5) / static_cast<double>(count));
    return t;
}

inline double relative_gap(double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
}

struct RecurrenceReport {
    /// Relative residuals |lhs - rhs| / max(1, |lhs|) with central differences.
    double max_residual = 0.0;
    /// Same with the Richardson-extrapolated derivative.
    double max_residual_richardson = 0.0;
    double max_absolute = 0.0;
    double odd_residual = 0.0;
    double even_residual = 0.0;
    /// Initial-value and closed-form checks (exact up to rounding).
    double initial_residual = 0.0;
    /// Agreement between independent evaluation paths, where there are two.
    double path_agreement = 0.0;
};

inline double munzner_q(int g, int m1, int m2, double t, int k) {
    return MunznerSpectrum::at(g, m1, m2, t).power_sum(k);
}

/// Q_{k+1} = (g/k) sqrt(1-t^2) Q_k' - Q_{k-1}, for k = 1 .. k_max - 1, with
/// Q_0 = n and the closed form of Q_1 checked separately.
inline RecurrenceReport qk_recurrence_check(int g, int m1, int m2, std::span<const double> t_samples,
                                            int k_max) {
    if (k_max < 2 || k_max > 8) throw RangeError("k_max must lie in 2..8");
    RecurrenceReport rep;
    const int n_expected = m1 * ((g + 1) / 2) + m2 * (g / 2);
    for (double t : t_samples) {
        if (std::abs(t) >= 0.9 + 1e-12) throw RangeError("t samples must lie in (-0.9, 0.9)");
        const double q1_closed = 0.5 * m1 * g * std::sqrt((1 + t) / (1 - t)) -
                                 0.5 * m2 * g * std::sqrt((1 - t) / (1 + t));
        rep.initial_residual = std::max(rep.initial_residual, relative_gap(munzner_q(g, m1, m2, t, 1), q1_closed));
        rep.initial_residual = std::max(rep.initial_residual, std::abs(munzner_q(g, m1, m2, t, 0) - n_expected));
        for (int k = 1; k < k_max; ++k) {
            const auto qk = [&](double s) { return munzner_q(g, m1, m2, s, k); };
            const DerivativePair d = differentiate(qk, t);
            const double lhs = munzner_q(g, m1, m2, t, k + 1);
            const double c = static_cast<double>(g) / k * std::sqrt(1 - t * t);
            const double q_prev = munzner_q(g, m1, m2, t, k - 1);
            const double rhs = c * d.central - q_prev;
            const double rhs_r = c * d.richardson - q_prev;
            rep.max_residual = std::max(rep.max_residual, relative_gap(lhs, rhs));
            rep.max_residual_richardson = std::max(rep.max_residual_richardson, relative_gap(lhs, rhs_r));
            rep.max_absolute = std::max(rep.max_absolute, std::abs(lhs - rhs));
            double& par = (k % 2 == 1) ? rep.odd_residual : rep.even_residual;
            par = std::max(par, relative_gap(lhs, rhs));
        }
    }
    return rep;
}

/// rho_k(D^2F) on the level f = t from the Muenzner spectrum:
/// sum over {-g sqrt(1-t^2) lambda_i + g t} with multiplicity, plus (g(g-1))^k (1 + (-1)^k).
inline double rhobar_from_spectrum(int g, int m1, int m2, double t, int k) {
    const MunznerSpectrum ms = MunznerSpectrum::at(g, m1, m2, t);
    double s = 0.0;
    for (std::size_t i = 0; i < ms.curvatures.size(); ++i)
        s += ms.multiplicities[i] * std::pow(-g * std::sqrt(1 - t * t) * ms.curvatures[i] + g * t, k);
    const double top = static_cast<double>(g) * (g - 1);
    return s + std::pow(top, k) + std::pow(-top, k);
}

/// Right-hand side of the parity-split recurrence for rho-bar_{k+1}, k >= 1.
inline double rhobar_recurrence_rhs(int g, int k, double t, double rho_k, double rho_k_prime, double rho_km1) {
    const double gd = g;
    const double forcing = 2.0 * std::pow(gd, k + 1) * std::pow(gd - 1, k) * (gd - 2) * (k % 2 == 1 ? 1.0 : t);
    return -(gd * gd / k) * (1 - t * t) * rho_k_prime - gd * (gd - 2) * t * rho_k +
           gd * gd * (gd - 1) * rho_km1 + forcing;
}

/// Checks the rho-bar recurrence for k = 1 .. k_max - 1 with rho-bar taken
/// from the spectrum (path a); path b evaluates rho_k(D^2F) at a point moved
/// onto each level and is compared against path a.
inline RecurrenceReport rhobar_recurrence_check(const IsoPolynomial& p, std::span<const double> t_samples,
                                                int k_max, std::uint64_t seed = 1) {
    if (k_max < 2 || k_max > 8) throw RangeError("k_max must lie in 2..8");
    const int g = p.degree(), m1 = p.m1(), m2 = p.m2();
    RecurrenceReport rep;
    const double rho1_expected = 0.5 * g * g * (m2 - m1);
    const auto rb = [&](int k) { return [=](double s) { return rhobar_from_spectrum(g, m1, m2, s, k); }; };

    // A base point away from the focal set.
    Vector base;
    for (std::uint64_t i = 0;; ++i) {
        base = random_sphere_point(seed, i, p.ambient_dim());
        if (std::abs(p.eval(base)) < 0.9) break;
    }

    for (double t : t_samples) {
        if (std::abs(t) >= 0.9 + 1e-12) throw RangeError("t samples must lie in (-0.9, 0.9)");
        rep.initial_residual = std::max(rep.initial_residual, std::abs(rhobar_from_spectrum(g, m1, m2, t, 0) - (p.n() + 2)));
        rep.initial_residual = std::max(rep.initial_residual, std::abs(rhobar_from_spectrum(g, m1, m2, t, 1) - rho1_expected));

        const LevelProjection proj = level_project(p, base, t);
        const SymmetricMatrix h = p.hessian(proj.y);
        for (int k = 0; k <= k_max; ++k)
            rep.path_agreement = std::max(rep.path_agreement,
                                          relative_gap(rhobar_from_spectrum(g, m1, m2, t, k), rho_k(h, static_cast<std::size_t>(k))));

        for (int k = 1; k < k_max; ++k) {
            const DerivativePair d = differentiate(rb(k), t);
            const double lhs = rhobar_from_spectrum(g, m1, m2, t, k + 1);
            const double rk = rhobar_from_spectrum(g, m1, m2, t, k);
            const double rkm1 = rhobar_from_spectrum(g, m1, m2, t, k - 1);
            const double rhs = rhobar_recurrence_rhs(g, k, t, rk, d.central, rkm1);
            const double rhs_r = rhobar_recurrence_rhs(g, k, t, rk, d.richardson, rkm1);
            rep.max_residual = std::max(rep.max_residual, relative_gap(lhs, rhs));
            rep.max_residual_richardson = std::max(rep.max_residual_richardson, relative_gap(lhs, rhs_r));
            rep.max_absolute = std::max(rep.max_absolute, std::abs(lhs - rhs));
            double& par = (k % 2 == 1) ? rep.odd_residual : rep.even_residual;
            par = std::max(par, relative_gap(lhs, rhs));
        }
    }
    return rep;
}

struct RecurrenceRow {
    double t = 0.0;
    std::vector<double> q;
    std::vector<double> rhobar;
};

/// Rows of (t, Q_1..Q_k, rho-bar_0..rho-bar_k) for plotting.
inline std::vector<RecurrenceRow> recurrence_table(int g, int m1, int m2, std::span<const double> t_samples,
                                                   int k_max) {
    std::vector<RecurrenceRow> rows;
    for (double t : t_samples) {
        RecurrenceRow r{t, {}, {}};
        for (int k = 1; k <= k_max; ++k) r.q.push_back(munzner_q(g, m1, m2, t, k));
        for (int k = 0; k <= k_max; ++k) r.rhobar.push_back(rhobar_from_spectrum(g, m1, m2, t, k));
        rows.push_back(std::move(r));
    }
    return rows;
}

// --- constancy of mean curvatures on a level --------------------------------

struct LevelConstancy {
    double level = 0.0;
    /// mean and standard deviation of sigma_j(S), j = 1 .. j_max
    std::vector<double> mean;
    std::vector<double> stddev;
};

inline LevelConstancy level_mean_curvatures(const IsoPolynomial& p, double level, std::size_t samples,
                                            int j_max, std::uint64_t seed) {
    LevelConstancy out{level, std::vector<double>(j_max, 0.0), std::vector<double>(j_max, 0.0)};
    std::vector<std::vector<double>> values(j_max);
    std::uint64_t index = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        Vector x;
        do x = random_sphere_point(seed, index++, p.ambient_dim());
        while (std::abs(p.eval(x)) > 0.95);
        const LevelProjection proj = level_project(p, x, level);
        const Spectrum spec = shape_spectrum(frame_at(p, proj.y));
        const std::vector<double> sig = elementary_symmetric(spec.values, static_cast<std::size_t>(j_max));
        for (int j = 1; j <= j_max; ++j) values[j - 1].push_back(sig[j]);
    }
    for (int j = 0; j < j_max; ++j) {
        double mean = 0.0;
        for (double v : values[j]) mean += v;
        mean /= static_cast<double>(samples);
        double var = 0.0;
        for (double v : values[j]) var += (v - mean) * (v - mean);
        out.mean[j] = mean;
        out.stddev[j] = std::sqrt(var / static_cast<double>(samples));
    }
    return out;
}

}  // namespace isopar
