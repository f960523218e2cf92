#pragma once

// Verification suites behind the command-line tool. Each returns a report
// whose details carry their own tolerances; table output goes to CSV.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isopar/hopf.hpp"
#include "isopar/polyfam.hpp"
#include "isopar/report.hpp"
#include "isopar/riccati.hpp"
#include "isopar/sampling.hpp"
#include "isopar/spherelevel.hpp"

namespace isopar {

struct FamilySpec {
    std::string family;
    int m = 1;
    int r = 0;

    IsoPolynomial build() const { return IsoPolynomial::from_spec(family, m, r); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["family"] = family;
        j["m"] = m;
        j["r"] = r;
        return j;
    }
};

struct SuiteResult {
    SuiteReport report;
    std::optional<CsvTable> csv;
};

namespace detail {

/// Random unit vector with |F| below `bound`, drawn deterministically.
inline Vector regular_sphere_point(const IsoPolynomial& p, std::uint64_t seed, std::uint64_t& index,
                                   double bound = 0.95) {
    while (true) {
        Vector x = random_sphere_point(seed, index++, p.ambient_dim());
        if (std::abs(p.eval(x)) < bound) return x;
    }
}

inline double ball_radius() { return 2.0; }

}  // namespace detail

// --- Cartan-Muenzner and transnormality ----------------------------------------

inline SuiteResult run_verify_cm(const FamilySpec& spec, std::size_t samples, std::uint64_t seed, double tol) {
    SuiteResult res;
    SuiteReport& rep = res.report;
    rep.command = "verify-cm";
    rep.params = spec.to_json();
    rep.params["tol"] = tol;
    rep.seed = seed;
    rep.samples = samples;
    const IsoPolynomial p = spec.build();

    double grad_res = 0.0, lap_res = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector x = random_ball_point(seed, s, p.ambient_dim(), detail::ball_radius());
        const auto [r1, r2] = cm_residuals(p, x);
        const auto [s1, s2] = cm_scales(p, x);
        grad_res = std::max(grad_res, std::abs(r1) / s1);
        lap_res = std::max(lap_res, std::abs(r2) / s2);
    }
    rep.add("cm-gradient", grad_res, tol, "|DF|^2 = g^2 |x|^(2g-2)");
    rep.add("cm-laplacian", lap_res, tol, "Laplacian F = (g^2/2)(m2-m1)|x|^(g-2)");

    double b_res = 0.0, a_res = 0.0;
    std::uint64_t index = samples;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector x = detail::regular_sphere_point(p, seed, index);
        const auto [r1, r2] = transnormal_residuals(p, x);
        b_res = std::max(b_res, std::abs(r1));
        a_res = std::max(a_res, std::abs(r2));
    }
    rep.add("transnormal-b", b_res, tol, "|grad f|^2 = g^2 (1 - f^2) on the sphere");
    rep.add("transnormal-a", a_res, tol, "Laplacian f = (g^2/2)(m2-m1) - g(n+g) f on the sphere");
    return res;
}

// --- higher Laplacians and power sums of the Hessian ----------------------------

inline SuiteResult run_verify_hidden(const FamilySpec& spec, const std::vector<int>& ks, std::size_t samples,
                                     std::uint64_t seed, double tol) {
    for (int k : ks)
        if (k < 1 || k > 5) throw RangeError("k must lie in 1..5, got " + std::to_string(k));
    SuiteResult res;
    SuiteReport& rep = res.report;
    rep.command = "verify-hidden";
    rep.params = spec.to_json();
    rep.params["k"] = ks;
    rep.params["tol"] = tol;
    rep.seed = seed;
    rep.samples = samples;
    const IsoPolynomial p = spec.build();
    const bool cartan_cubic = p.kind() == FamilyKind::Cartan && p.m1() == 1;

    for (int k : ks) {
        if (!cartan_cubic && k == 5)
            throw RangeError("no identity for k = 5 is available on " + p.name());
        double delta_res = 0.0, rho_res = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            const Vector x = random_ball_point(seed, s, p.ambient_dim(), detail::ball_radius());
            const double r = norm(x);
            const double f = p.eval(x);
            if (cartan_cubic) {
                const double expected[5] = {0.0, -63.0 * r * r, -54.0 * f, 972.0 * std::pow(r, 4),
                                            1944.0 * r * r * f};
                const double d = delta_k(p, x, k) - expected[k - 1];
                delta_res = std::max(delta_res, std::abs(d) / std::max(1.0, std::pow(r, k)));
            } else if (k == 1) {
                const double d = delta_k(p, x, 1) - 0.5 * p.degree() * p.degree() * (p.m2() - p.m1()) *
                                                        std::pow(r, p.degree() - 2);
                delta_res = std::max(delta_res, std::abs(d) / std::max(1.0, std::pow(r, p.degree() - 2)));
            }
            if (k >= 2 && k <= 4)
                rho_res = std::max(rho_res, std::abs(hidden_rho_residual(p, x, k)) /
                                                std::max(1.0, std::pow(r, k * (p.degree() - 2))));
        }
        const std::string ks_str = std::to_string(k);
        if (cartan_cubic || k == 1)
            rep.add("delta-" + ks_str, delta_res, tol,
                    cartan_cubic ? "sigma_k of the Hessian of the real Cartan cubic"
                                   : "sigma_1 of the Hessian is the Laplacian");
        if (k >= 2 && k <= 4) {
            std::string ref = "homogenized closed form of tr (D^2F)^" + ks_str;
            if (k == 4 && p.n() < 4) ref += " (evaluated as written for n < 4)";
            rep.add("rho-" + ks_str, rho_res, tol, ref);
        }
    }
    return res;
}

// --- alpha scan -------------------------------------------------------------

inline ComplexTag parse_complex_tag(const std::string& s) {
    if (s == "block") return ComplexTag::BlockStandard;
    if (s == "right-i") return ComplexTag::RightMultI;
    if (s == "left-i") return ComplexTag::LeftMultI;
    throw RangeError("unknown complex structure '" + s + "' (expected block, right-i or left-i)");
}

inline SuiteResult run_alpha_scan(const FamilySpec& spec, const std::string& j_tag, double level,
                                  std::size_t samples, std::uint64_t seed) {
    SuiteResult res;
    SuiteReport& rep = res.report;
    rep.command = "alpha-scan";
    rep.params = spec.to_json();
    rep.params["J"] = j_tag;
    rep.params["level"] = level;
    rep.seed = seed;
    rep.samples = samples;

    IsoPolynomial p = spec.build();
    ComplexStructure j = build_complex_structure(parse_complex_tag(j_tag), p.ambient_dim());
    rep.add("s1-invariance", s1_invariance_residual(p, j, samples, seed), kInvarianceTolerance,
            "F(cos t z + sin t Jz) = F(z)");
    const HopfContext ctx(std::move(p), std::move(j));
    const IsoPolynomial& poly = ctx.polynomial();

    std::vector<AlphaSample> scan = alpha_scan(ctx, level, samples, seed);
    if (std::abs(level) < 1e-12)
        for (const auto& w : witness_points(ctx)) {
            AlphaSample s = alpha_sample(ctx, w.z, scan.size());
            s.label = w.label;
            scan.push_back(s);
        }

    double paths = 0.0, closed = 0.0, orbit = 0.0;
    bool has_closed = true;
    for (const auto& s : scan) paths = std::max(paths, std::abs(s.alpha - s.alpha_geometric));
    for (std::size_t i = 0; i < samples; ++i) {
        std::uint64_t index = 1000000 + i;
        const Vector x = detail::regular_sphere_point(poly, seed, index);
        const double od = omega_direct(ctx, x);
        try {
            closed = std::max(closed, std::abs(omega_closed_form(ctx, x) - od) / std::max(1.0, std::abs(od)));
        } catch (const UnsupportedPairError&) {
            has_closed = false;
        }
        const double theta = random_uniform(seed, index, 0.0, 2.0 * std::numbers::pi);
        const Vector xr = axpy(scaled(x, std::cos(theta)), std::sin(theta), ctx.complex_structure().apply(x));
        orbit = std::max(orbit, std::abs(alpha_at(ctx, xr).formula - alpha_at(ctx, x).formula));
    }
    rep.add("alpha-paths", paths, 1e-7, "alpha from Omega_F equals <S J nu, J nu>");
    rep.add("alpha-orbit", orbit, 1e-8, "alpha is constant along S^1 orbits");
    if (has_closed) rep.add("omega-closed-form", closed, 1e-9, "closed form of Omega_F for this (system, J) pair");
    for (const auto& w : witness_points(ctx))
        rep.add("witness-" + w.label, std::abs(omega_direct(ctx, w.z) - w.expected_omega), 1e-9,
                "Omega_F = " + std::to_string(static_cast<int>(w.expected_omega)) + " at an explicit point");

    const AlphaStats st = alpha_stats(scan);
    const CliffordSystem* sys = poly.clifford();
    if (sys && sys->tag == CliffordTag::StandardBlock && sys->m == 1)
        rep.add("alpha-constant", st.stddev, 1e-7, "alpha is constant on each level when m = 1");
    if (sys && sys->tag == CliffordTag::StandardBlock && sys->m == 2 && std::abs(level) < 1e-12)
        rep.add("alpha-range", std::max(0.0, 3.0 - (st.max - st.min)), 0.0,
                "alpha varies by at least 3 over the level F = 0 when m = 2");

    rep.extra["alpha"] = {{"min", st.min}, {"max", st.max}, {"mean", st.mean}, {"std", st.stddev}};
    int lmin = 1 << 30, lmax = -1;
    for (const auto& s : scan) {
        if (s.l < 0) continue;
        lmin = std::min(lmin, s.l);
        lmax = std::max(lmax, s.l);
    }
    rep.extra["l"] = {{"min", lmin}, {"max", lmax}};

    CsvTable csv({"index", "level", "alpha", "omega", "l"});
    for (const auto& s : scan)
        csv.add_row({static_cast<double>(s.index), s.level, s.alpha, s.omega, static_cast<double>(s.l)});
    res.csv = std::move(csv);
    return res;
}

// --- Riccati evolution ------------------------------------------------------

struct RiccatiSpec {
    std::vector<double> kappas;
    int mult = 1;
    std::vector<double> mu0;
    double t0 = -0.5;
    double t1 = 0.5;
    std::size_t steps = 100;
};

inline RiccatiFamily build_family(const RiccatiSpec& spec) {
    if (spec.mu0.empty()) throw RangeError("mu0 must contain at least one value");
    if (spec.kappas.size() == 1) return {JacobiSpectrum::space_form(spec.kappas[0], spec.mu0.size()), spec.mu0};
    if (spec.kappas.size() == 2)
        return {JacobiSpectrum::rank_one(spec.kappas[0], spec.kappas[1], spec.mult, spec.mu0.size()), spec.mu0};
    throw RangeError("kappa takes one value (space form) or two values (rank one)");
}

inline SuiteResult run_riccati(const RiccatiSpec& spec) {
    SuiteResult res;
    SuiteReport& rep = res.report;
    rep.command = "riccati";
    rep.params["kappa"] = spec.kappas;
    rep.params["mult"] = spec.mult;
    rep.params["mu0"] = spec.mu0;
    rep.params["t0"] = spec.t0;
    rep.params["t1"] = spec.t1;
    rep.params["steps"] = spec.steps;
    rep.samples = spec.steps + 1;

    const RiccatiFamily fam = build_family(spec);
    const std::size_t n = fam.size();
    const int k_max = static_cast<int>(std::min<std::size_t>(n, 6));
    const Trajectory traj = trajectory(fam, spec.t0, spec.t1, spec.steps, std::max(k_max, 1));
    const auto [lo, hi] = fam.blow_up_times();
    rep.extra["blow_up_times"] = {std::isfinite(lo) ? nlohmann::ordered_json(lo) : nlohmann::ordered_json(nullptr),
                                  std::isfinite(hi) ? nlohmann::ordered_json(hi) : nlohmann::ordered_json(nullptr)};

    std::vector<double> ts;
    for (const auto& row : traj.rows) ts.push_back(row.t);

    double numeric = 0.0, ode = 0.0;
    for (double t : ts) {
        const std::vector<double> closed = evolve_closed(fam, t);
        const std::vector<double> rk = evolve_numeric(fam, t, 20000);
        const std::vector<double> d = evolve_closed_derivative(fam, t);
        for (std::size_t k = 0; k < n; ++k) {
            numeric = std::max(numeric, std::abs(closed[k] - rk[k]) / std::max(1.0, std::abs(closed[k])));
            const double rhs = closed[k] * closed[k] + fam.jacobi().kappas[k];
            ode = std::max(ode, std::abs(d[k] - rhs) / std::max(1.0, std::abs(rhs)));
        }
    }
    rep.add("closed-vs-rk4", numeric, 1e-8, "closed-form solution against fourth-order Runge-Kutta");
    rep.add("ode", ode, 1e-10, "mu' = mu^2 + kappa for the differentiated closed form");
    rep.add("power-sum-recurrence", check_power_sum_recurrence(fam, ts, 6), 1e-9, "Q_{i+1} = Q_i'/i - Gamma_{i-1,1}");
    rep.add("gamma-recurrence", check_gamma_recurrence(fam, ts, 6), 1e-9,
            "Gamma_{i+1,1} = (Gamma_{i1}' - sum_j tr(S^j R S^{i-1-j} R))/i");
    rep.add("mean-curvature", check_mean_curvature_riccati(fam, ts), 1e-10, "H' = |S|^2 + tr R");
    if (fam.jacobi().tag == JacobiTag::RankOne)
        rep.add("split-recurrences", check_split_recurrences(fam, ts, 6), 1e-10,
                "Phi_i' = i(Phi_{i+1} + kappa1 Phi_{i-1}), likewise Psi with kappa2");
    double chain = 0.0, recovery = 0.0;
    for (double t : ts) {
        chain = std::max(chain, propagate_q4_q5(fam, t).max_discrepancy);
        if (n <= 8) {
            const RecoveredSpectrum rs = moment_to_spectrum_evolution(fam, t);
            std::vector<double> mu = evolve_closed(fam, t);
            std::sort(mu.begin(), mu.end(), std::greater<>());
            for (std::size_t k = 0; k < n; ++k)
                recovery = std::max(recovery, std::abs(rs.spectrum.values[k] - mu[k]));
        }
    }
    rep.add("chain-q4-q5", chain, 1e-8, "Q4 and Q5 propagated from Q1..Q3 and the Jacobi spectrum");
    if (n <= 8) rep.add("moment-recovery", recovery, 1e-6, "principal curvatures recovered from Q1..Qn");
    if (!traj.complete) {
        rep.add("domain", 1.0, 0.0, "requested interval crosses a blow-up");
        rep.extra["blow_up"] = traj.blow_up;
    }

    std::vector<std::string> header{"t"};
    for (std::size_t k = 1; k <= n; ++k) header.push_back("mu" + std::to_string(k));
    for (int k = 1; k <= std::max(k_max, 1); ++k) header.push_back("Q" + std::to_string(k));
    header.push_back("H");
    CsvTable csv(header);
    for (const auto& row : traj.rows) {
        std::vector<double> r{row.t};
        r.insert(r.end(), row.mu.begin(), row.mu.end());
        r.insert(r.end(), row.q.begin(), row.q.end());
        r.push_back(row.mean_curvature);
        csv.add_row(r);
    }
    res.csv = std::move(csv);
    return res;
}

// --- shape operator spectrum on a level ---------------------------------------

inline SuiteResult run_spectrum(const FamilySpec& spec, double level, std::size_t samples, std::uint64_t seed) {
    SuiteResult res;
    SuiteReport& rep = res.report;
    rep.command = "spectrum";
    rep.params = spec.to_json();
    rep.params["level"] = level;
    rep.seed = seed;
    rep.samples = samples;
    const IsoPolynomial p = spec.build();
    const int g = p.degree();

    double munzner = 0.0, frame = 0.0, ambient = 0.0, proj = 0.0, path = 0.0;
    bool flipped = false;
    std::uint64_t index = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector x = detail::regular_sphere_point(p, seed, index);
        const LevelProjection lp = level_project(p, x, level);
        proj = std::max(proj, std::abs(p.eval(lp.y) - level));
        path = std::max(path, lp.path_residual);
        const SpherePointFrame fr = frame_at(p, lp.y);
        const MunznerReport mr = munzner_check(fr, g, p.m1(), p.m2());
        munzner = std::max(munzner, mr.max_error);
        flipped = flipped || mr.orientation_flipped;
        frame = std::max(frame, frame_residuals(p, fr).max());
        ambient = std::max(ambient, ambient_hessian_spectrum_residual(p, fr));
    }
    rep.add("level-projection", proj, 1e-10, "|F(y) - t| after moving along the normal circle");
    rep.add("projection-path", path, 1e-8, "F(cos s x + sin s nu) = cos(g(tau0 - s))");
    rep.add("munzner-spectrum", munzner, 1e-6, "principal curvatures cot(tau + (i-1) pi/g), t = cos(g tau)");
    rep.add("frame-invariants", frame, 1e-8, "unit normal, transnormality and Hessian block structure");
    rep.add("ambient-hessian-spectrum", ambient, 1e-6,
            "spectrum of D^2F is {-g sqrt(1-f^2) mu_i + g f} with +-g(g-1)");
    rep.extra["orientation_flipped"] = flipped;

    const LevelConstancy lc = level_mean_curvatures(p, level, std::min<std::size_t>(samples, 20), 4, seed + 1);
    rep.add("mean-curvature-constancy", *std::max_element(lc.stddev.begin(), lc.stddev.end()), 1e-7,
            "sigma_j(S), j <= 4, constant along the level");

    const std::vector<double> ts = default_t_samples(20);
    const RecurrenceReport q = qk_recurrence_check(g, p.m1(), p.m2(), ts, 6);
    rep.add("q-recurrence", q.max_residual, 1e-4, "Q_{k+1} = (g/k) sqrt(1-t^2) Q_k' - Q_{k-1}");
    rep.add("q-initial", q.initial_residual, 1e-12, "Q_0 = n and the closed form of Q_1");
    const RecurrenceReport rb = rhobar_recurrence_check(p, ts, 6, seed);
    rep.add("rhobar-recurrence-odd", rb.odd_residual, 1e-4, "parity-split recurrence for tr (D^2F)^k, k odd");
    rep.add("rhobar-recurrence-even", rb.even_residual, 1e-4, "parity-split recurrence for tr (D^2F)^k, k even");
    rep.add("rhobar-initial", rb.initial_residual, 1e-9, "rho-bar_0 = n + 2, rho-bar_1 = (g^2/2)(m2 - m1)");
    rep.add("rhobar-paths", rb.path_agreement, 1e-7, "spectrum formula against tr (D^2F)^k at a point of the level");
    rep.extra["richardson"] = {{"q", q.max_residual_richardson}, {"rhobar", rb.max_residual_richardson}};

    std::vector<std::string> header{"t"};
    for (int k = 1; k <= 6; ++k) header.push_back("Q" + std::to_string(k));
    for (int k = 0; k <= 6; ++k) header.push_back("rhobar" + std::to_string(k));
    CsvTable csv(header);
    for (const auto& row : recurrence_table(g, p.m1(), p.m2(), ts, 6)) {
        std::vector<double> r{row.t};
        r.insert(r.end(), row.q.begin(), row.q.end());
        r.insert(r.end(), row.rhobar.begin(), row.rhobar.end());
        csv.add_row(r);
    }
    res.csv = std::move(csv);
    return res;
}

}  // namespace isopar
