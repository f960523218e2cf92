#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isopar/clifford.hpp"
#include "isopar/dense.hpp"
#include "isopar/errors.hpp"
#include "isopar/polyfam.hpp"
#include "isopar/sampling.hpp"
#include "isopar/spherelevel.hpp"
#include "isopar/symmat.hpp"

namespace isopar {

inline constexpr double kInvarianceTolerance = 1e-9;
inline constexpr std::size_t kInvarianceSamples = 50;
inline constexpr std::uint64_t kInvarianceSeed = 0x5eed51;
/// phi_i^2 above this counts as a non-horizontal principal direction.
inline constexpr double kVerticalThreshold = 1e-6;

/// max |F(cos t z + sin t Jz) - F(z)| over random unit z and angles t.
inline double s1_invariance_residual(const IsoPolynomial& p, const ComplexStructure& j, std::size_t samples,
                                     std::uint64_t seed) {
    if (j.dim() != p.ambient_dim()) throw RangeError("complex structure dimension does not match");
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector z = random_sphere_point(seed, 2 * s, p.ambient_dim());
        const double theta = random_uniform(seed, 2 * s + 1, 0.0, 2.0 * std::numbers::pi);
        const Vector rotated = axpy(scaled(z, std::cos(theta)), std::sin(theta), j.apply(z));
        worst = std::max(worst, std::abs(p.eval(rotated) - p.eval(z)));
    }
    return worst;
}

/// An isoparametric polynomial together with a complex structure under which
/// it is S^1-invariant. Invariance is checked on construction.
class HopfContext {
public:
    HopfContext(IsoPolynomial p, ComplexStructure j) : p_(std::move(p)), j_(std::move(j)) {
        const double res = s1_invariance_residual(p_, j_, kInvarianceSamples, kInvarianceSeed);
        if (res > kInvarianceTolerance)
            throw InvarianceError(p_.name() + " is not S^1-invariant under the " +
                                      std::string(to_string(j_.tag())) + " complex structure",
                                  res);
    }

    const IsoPolynomial& polynomial() const noexcept { return p_; }
    const ComplexStructure& complex_structure() const noexcept { return j_; }
    int g() const noexcept { return p_.degree(); }

private:
    IsoPolynomial p_;
    ComplexStructure j_;
};

/// DF^t J D^2F J DF at x.
inline double omega_direct(const HopfContext& ctx, std::span<const double> x) {
    const IsoPolynomial& p = ctx.polynomial();
    const Vector df = p.grad(x);
    const Vector jdf = ctx.complex_structure().apply(df);
    const Vector h_jdf = p.hessian(x).matrix() * jdf;
    return dot(df, ctx.complex_structure().apply(h_jdf));
}

namespace detail {

inline std::vector<double> clifford_coordinates(const CliffordSystem& sys, std::span<const double> z) {
    std::vector<double> a;
    for (const auto& ap : sys.generators) a.push_back(ap.matrix().bilinear(z, z));
    return a;
}

}  // namespace detail

/// Closed form of Omega_F on the unit sphere, for the (system, J) pairs where one is known:
/// standard systems under the block structure, and the Ozeki-Takeuchi system
/// under right or left multiplication by i.
inline double omega_closed_form(const HopfContext& ctx, std::span<const double> z) {
    const IsoPolynomial& p = ctx.polynomial();
    const CliffordSystem* sys = p.clifford();
    const ComplexStructure& j = ctx.complex_structure();
    if (sys == nullptr) throw UnsupportedPairError("no closed form for Omega_F of a non-FKM polynomial");
    const double f = p.eval(z);
    const std::vector<double> a = detail::clifford_coordinates(*sys, z);
    const double base = 2.0 * f * f - f - 2.0;

    if (sys->tag == CliffordTag::StandardBlock && j.tag() == ComplexTag::BlockStandard) {
        if (sys->m == 1) return 64.0 * (-2.0 * f * f - f + 2.0);
        if (sys->m == 2) return 64.0 * (-2.0 * f * f - f + 2.0 - 8.0 * (1.0 + f) * a[2] * a[2]);
        std::vector<Vector> jaz;
        for (const auto& ap : sys->generators) jaz.push_back(j.apply(ap.matrix() * z));
        double tail = 0.0;
        for (std::size_t q = 2; q < a.size(); ++q) {
            const Vector aqz = sys->generators[q].matrix() * z;
            double inner = 0.0;
            for (std::size_t pp = 2; pp < a.size(); ++pp) inner += a[pp] * dot(aqz, jaz[pp]);
            tail += inner * inner;
        }
        return 64.0 * (base + 8.0 * (1.0 + f) * (a[0] * a[0] + a[1] * a[1]) + 16.0 * tail);
    }
    if (sys->tag == CliffordTag::OzekiTakeuchi && j.tag() == ComplexTag::RightMultI) {
        std::vector<Vector> az;
        for (const auto& ap : sys->generators) az.push_back(ap.matrix() * z);
        double tail = 0.0;
        for (std::size_t q = 0; q < 4; ++q) {
            const Vector jaqz = j.apply(az[q]);
            double inner = 0.0;
            for (std::size_t pp = 0; pp < 4; ++pp) inner += a[pp] * dot(jaqz, az[pp]);
            tail += inner * inner;
        }
        return 64.0 * (base + 16.0 * tail);
    }
    if (sys->tag == CliffordTag::OzekiTakeuchi && j.tag() == ComplexTag::LeftMultI) {
        const Vector a1z = sys->generators[1].matrix() * z;
        const double c = dot(sys->generators[0].matrix() * j.apply(a1z), z);
        return 64.0 * (base + 8.0 * (1.0 + f) * (a[2] * a[2] + a[3] * a[3]) +
                       16.0 * (a[0] * a[0] + a[1] * a[1]) * c * c);
    }
    throw UnsupportedPairError("no closed form for Omega_F with the " + std::string(to_string(sys->tag)) +
                               " system under the " + std::string(to_string(j.tag())) + " structure");
}

struct AlphaValue {
    /// From Omega_F: (g^3 F (3 - 2F^2) + Omega) / (g^3 (1 - F^2)^{3/2}).
    double formula = 0.0;
    /// <S J nu, J nu> from the shape operator.
    double geometric = 0.0;
    double difference = 0.0;
};

inline double alpha_from_omega(int g, double f, double omega) {
    const double g3 = std::pow(g, 3);
    return (g3 * f * (3.0 - 2.0 * f * f) + omega) / (g3 * std::pow(1.0 - f * f, 1.5));
}

inline AlphaValue alpha_at(const HopfContext& ctx, std::span<const double> x) {
    const SpherePointFrame fr = frame_at(ctx.polynomial(), x);
    AlphaValue out;
    out.formula = alpha_from_omega(ctx.g(), fr.f, omega_direct(ctx, x));
    const Vector jnu = ctx.complex_structure().apply(fr.nu);
    const double hf = ctx.polynomial().hessian(x).matrix().bilinear(jnu, jnu) - ctx.g() * fr.f * dot(jnu, jnu);
    out.geometric = -hf / fr.grad_norm;
    out.difference = out.formula - out.geometric;
    return out;
}

struct HopfBlocks {
    /// Shape operator in the frame (e_1, ..., e_{n-2}, J nu, J x).
    SymmetricMatrix shape{1};
    /// Block on (e_1, ..., e_{n-2}, J nu).
    SymmetricMatrix reduced{1};
    double alpha = 0.0;
    /// |S(Jx) + J nu|
    double s_jx_residual = 0.0;
    /// S(Jx, Jx)
    double jxjx_entry = 0.0;
    /// Largest S(e_i, Jx).
    double off_block = 0.0;
    /// sigma_1(S) - sigma_1(S~), sigma_2(S) - (sigma_2(S~) - 1),
    /// sigma_3(S) - (sigma_3(S~) - (sigma_1(S~) - alpha)).
    double sigma_residuals[3] = {0.0, 0.0, 0.0};
};

inline HopfBlocks hopf_blocks(const HopfContext& ctx, std::span<const double> x) {
    const IsoPolynomial& p = ctx.polynomial();
    const SpherePointFrame fr = frame_at(p, x);
    const Vector jx = ctx.complex_structure().apply(x);
    const Vector jnu = ctx.complex_structure().apply(fr.nu);
    const double tilt = std::abs(dot(jx, fr.nu));
    if (tilt > 1e-8) throw InvarianceError("Jx is not tangent to the level hypersurface", tilt);

    const std::size_t dim = p.ambient_dim();
    const Matrix rest = detail::complete_basis({fr.x, fr.nu, jnu, jx}, dim);
    const std::size_t n = rest.rows() + 2;
    Matrix frame(n, dim);
    frame.set_block(0, 0, rest);
    for (std::size_t c = 0; c < dim; ++c) {
        frame(n - 2, c) = jnu[c];
        frame(n - 1, c) = jx[c];
    }
    Matrix s = detail::restrict_form(p.hessian(x).matrix(), frame);
    for (std::size_t i = 0; i < n; ++i) s(i, i) -= p.degree() * fr.f;
    s *= -1.0 / fr.grad_norm;

    HopfBlocks out;
    out.shape = SymmetricMatrix(s, SymmetryPolicy::Symmetrize);
    Matrix red(n - 1, n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t k = 0; k + 1 < n; ++k) red(i, k) = out.shape(i, k);
    out.reduced = SymmetricMatrix(red, SymmetryPolicy::Reject);
    out.alpha = out.shape(n - 2, n - 2);

    // S(Jx) as an ambient vector, against -J nu.
    Vector sjx(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) sjx = axpy(sjx, out.shape(i, n - 1), frame.row(i));
    out.s_jx_residual = norm(axpy(sjx, 1.0, jnu));
    out.jxjx_entry = out.shape(n - 1, n - 1);
    for (std::size_t i = 0; i + 2 < n; ++i) out.off_block = std::max(out.off_block, std::abs(out.shape(i, n - 1)));

    const auto full = elementary_symmetric(eigensolve(out.shape).values, 3);
    const auto part = elementary_symmetric(eigensolve(out.reduced).values, 3);
    out.sigma_residuals[0] = full[1] - part[1];
    out.sigma_residuals[1] = full[2] - (part[2] - 1.0);
    out.sigma_residuals[2] = full[3] - (part[3] - (part[1] - out.alpha));
    return out;
}

/// phi_i^2 from the moments (1, 0, 1, alpha) of the distribution of Jx over
/// the principal eigenspaces. g = 2 uses the closed form.
inline std::vector<double> phi_squared_from_moments(std::span<const double> lambdas, double alpha) {
    const std::size_t g = lambdas.size();
    if (g == 2) {
        const double d = lambdas[0] - lambdas[1];
        if (std::abs(d) < kVandermondeMinGap) throw ConditioningError("coincident principal curvatures", d);
        return {-lambdas[1] / d, lambdas[0] / d};
    }
    if (g < 1 || g > 4) throw RangeError("moment system for phi_i^2 only determines g <= 4");
    const std::vector<double> moments{1.0, 0.0, 1.0, alpha};
    return vandermonde_solve(lambdas, std::span<const double>(moments).first(g));
}

struct HopfDecomposition {
    Vector x;
    /// Distinct principal curvatures, descending.
    std::vector<double> lambdas;
    std::vector<double> phi_sq;
    std::vector<double> phi_sq_moments;
    double max_difference = 0.0;
    int l = 0;
    double alpha = 0.0;
    /// sum phi^2 - 1, sum lambda phi^2, sum lambda^2 phi^2 - 1, sum lambda^3 phi^2 - alpha
    double moment_residuals[4] = {0.0, 0.0, 0.0, 0.0};
};

inline HopfDecomposition phi_decomposition(const HopfContext& ctx, std::span<const double> x) {
    const SpherePointFrame fr = frame_at(ctx.polynomial(), x);
    const EigenDecomposition eig = eigendecompose(fr.shape);
    const auto& groups = eig.spectrum.groups;
    if (groups.size() != static_cast<std::size_t>(ctx.g()))
        throw SpectralGapError("expected " + std::to_string(ctx.g()) + " distinct principal curvatures, found " +
                               std::to_string(groups.size()));

    const Vector jx = ctx.complex_structure().apply(x);
    const Vector coords = fr.basis * jx;
    HopfDecomposition out;
    out.x.assign(x.begin(), x.end());
    std::size_t col = 0;
    for (const auto& grp : groups) {
        double s = 0.0;
        for (std::size_t c = 0; c < grp.count; ++c, ++col) {
            const double proj = dot(eig.vectors.column(col), coords);
            s += proj * proj;
        }
        out.lambdas.push_back(grp.value);
        out.phi_sq.push_back(s);
        if (s > kVerticalThreshold) ++out.l;
    }
    const Vector jnu = ctx.complex_structure().apply(fr.nu);
    out.alpha = -(ctx.polynomial().hessian(x).matrix().bilinear(jnu, jnu) - ctx.g() * fr.f) / fr.grad_norm;

    for (std::size_t i = 0; i < out.lambdas.size(); ++i) {
        const double lam = out.lambdas[i], w = out.phi_sq[i];
        out.moment_residuals[0] += w;
        out.moment_residuals[1] += lam * w;
        out.moment_residuals[2] += lam * lam * w;
        out.moment_residuals[3] += lam * lam * lam * w;
    }
    out.moment_residuals[0] -= 1.0;
    out.moment_residuals[2] -= 1.0;
    out.moment_residuals[3] -= out.alpha;

    if (out.lambdas.size() <= 4) {
        out.phi_sq_moments = phi_squared_from_moments(out.lambdas, out.alpha);
        for (std::size_t i = 0; i < out.phi_sq.size(); ++i)
            out.max_difference = std::max(out.max_difference, std::abs(out.phi_sq[i] - out.phi_sq_moments[i]));
    }
    return out;
}

// --- witness points and scans ----------------------------------------------

struct WitnessPoint {
    std::string label;
    Vector z;
    double expected_omega = 0.0;
};

/// Explicit points where Omega_F = +-128: the m = 2 standard family (r even)
/// under the block structure and the Ozeki-Takeuchi r = 1 family under
/// either quaternionic structure. Empty for other pairs.
inline std::vector<WitnessPoint> witness_points(const HopfContext& ctx) {
    const CliffordSystem* sys = ctx.polynomial().clifford();
    const ComplexTag jt = ctx.complex_structure().tag();
    const std::size_t dim = ctx.polynomial().ambient_dim();
    std::vector<WitnessPoint> out;
    if (sys == nullptr) return out;
    if (sys->tag == CliffordTag::StandardBlock && sys->m == 2 && jt == ComplexTag::BlockStandard) {
        const std::size_t r = dim / 2, half = r / 2;
        Vector z(dim, 0.0), zc(dim, 0.0);
        z[0] = zc[0] = 1.0 / std::sqrt(2.0);
        z[r] = z[r + 1] = 0.5;
        zc[r + half] = zc[r + half + 1] = 0.5;
        out.push_back({"z", z, 128.0});
        out.push_back({"z-check", zc, -128.0});
    }
    if (sys->tag == CliffordTag::OzekiTakeuchi && sys->r == 1 &&
        (jt == ComplexTag::RightMultI || jt == ComplexTag::LeftMultI)) {
        const double s2 = std::sqrt(2.0);
        Vector z(dim, 0.0), zc(dim, 0.0);
        z[0] = 0.5 * std::sqrt(2.0 + s2);
        z[8] = 0.5 * std::sqrt(2.0 - s2);
        zc[0] = zc[8] = std::sqrt(2.0 + s2) / (2.0 * s2);
        zc[12] = 0.5 * std::sqrt(2.0 - s2);
        out.push_back({"z", z, 128.0});
        out.push_back({"z-check", zc, -128.0});
    }
    return out;
}

struct AlphaSample {
    std::size_t index = 0;
    double level = 0.0;
    double alpha = 0.0;
    double alpha_geometric = 0.0;
    double omega = 0.0;
    /// -1 when the principal curvatures could not be separated.
    int l = 0;
    std::string label;
};

struct AlphaStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

inline AlphaStats alpha_stats(const std::vector<AlphaSample>& samples) {
    AlphaStats st;
    if (samples.empty()) return st;
    st.min = st.max = samples.front().alpha;
    for (const auto& s : samples) {
        st.min = std::min(st.min, s.alpha);
        st.max = std::max(st.max, s.alpha);
        st.mean += s.alpha;
    }
    st.mean /= static_cast<double>(samples.size());
    for (const auto& s : samples) st.stddev += (s.alpha - st.mean) * (s.alpha - st.mean);
    st.stddev = std::sqrt(st.stddev / static_cast<double>(samples.size()));
    return st;
}

inline AlphaSample alpha_sample(const HopfContext& ctx, std::span<const double> y, std::size_t index) {
    AlphaSample s;
    s.index = index;
    s.level = ctx.polynomial().eval(y);
    s.omega = omega_direct(ctx, y);
    const AlphaValue a = alpha_at(ctx, y);
    s.alpha = a.formula;
    s.alpha_geometric = a.geometric;
    try {
        s.l = phi_decomposition(ctx, y).l;
    } catch (const SpectralGapError&) {
        s.l = -1;
    }
    return s;
}

/// alpha at `samples` random points moved onto the level `level`.
inline std::vector<AlphaSample> alpha_scan(const HopfContext& ctx, double level, std::size_t samples,
                                           std::uint64_t seed) {
    std::vector<AlphaSample> out;
    std::uint64_t index = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        Vector x;
        do x = random_sphere_point(seed, index++, ctx.polynomial().ambient_dim());
        while (std::abs(ctx.polynomial().eval(x)) > 0.95);
        const Vector y = level_project(ctx.polynomial(), x, level).y;
        out.push_back(alpha_sample(ctx, y, s));
    }
    return out;
}

}  // namespace isopar
