#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "isopar/cayley_dickson.hpp"
#include "isopar/clifford.hpp"
#include "isopar/dense.hpp"
#include "isopar/errors.hpp"
#include "isopar/sampling.hpp"
#include "isopar/sparse_polynomial.hpp"
#include "isopar/symmat.hpp"

namespace isopar {

enum class FamilyKind { FKM, Cartan };

inline constexpr std::size_t kConstructionSamples = 100;
inline constexpr double kConstructionTolerance = 1e-10;
inline constexpr std::uint64_t kConstructionSeed = 0x15090a7a;

/// Homogeneous isoparametric polynomial on R^{n+2}: either the
/// Ferus-Karcher-Muenzner quartic of a symmetric Clifford system or Cartan's
/// cubic over one of R, C, H, O.
///
/// Closed forms are the primary evaluation path. The expanded monomial form
/// is kept alongside and checked against the closed form at construction.
class IsoPolynomial {
public:
    static IsoPolynomial fkm(CliffordSystem sys) {
        if (verify_clifford(sys).max_residual() > kCliffordTolerance)
            throw ConstructionError("generators do not form a symmetric Clifford system");
        const int half = static_cast<int>(sys.dim / 2);
        if (half - sys.m - 1 <= 0)
            throw ConstructionError("FKM polynomial needs r - m - 1 > 0 (r = " + std::to_string(half) +
                                    ", m = " + std::to_string(sys.m) + ")");
        IsoPolynomial p;
        p.kind_ = FamilyKind::FKM;
        p.g_ = 4;
        p.m1_ = sys.m;
        p.m2_ = half - sys.m - 1;
        p.dim_ = sys.dim;
        p.system_ = std::move(sys);
        p.monomial_ = p.build_fkm_monomials();
        p.cross_check();
        return p;
    }

    /// Cartan's cubic on R^{3m+2}, m the dimension of the division algebra.
    static IsoPolynomial cartan(int m) {
        if (m != 1 && m != 2 && m != 4 && m != 8)
            throw ConstructionError("Cartan polynomial needs algebra dimension 1, 2, 4 or 8, got " +
                                    std::to_string(m));
        IsoPolynomial p;
        p.kind_ = FamilyKind::Cartan;
        p.g_ = 3;
        p.m1_ = m;
        p.m2_ = m;
        p.algebra_dim_ = m;
        p.dim_ = static_cast<std::size_t>(3 * m + 2);
        p.monomial_ = p.build_cartan_monomials();
        p.cross_check();
        return p;
    }

    /// family is "fkm", "ot" or "cartan". For "fkm" r is half the ambient
    /// dimension; for "ot" it is the block parameter of the (3, 4r) system.
    static IsoPolynomial from_spec(const std::string& family, int m, int r) {
        if (family == "fkm") {
            if (r - m - 1 <= 0)
                throw ConstructionError("FKM polynomial needs r - m - 1 > 0 (r = " + std::to_string(r) +
                                        ", m = " + std::to_string(m) + ")");
            return fkm(build_standard_system(m, r));
        }
        if (family == "ot") return fkm(build_ozeki_takeuchi_system(r));
        if (family == "cartan") return cartan(m);
        throw RangeError("unknown polynomial family '" + family + "'");
    }

    static IsoPolynomial from_descriptor(const nlohmann::ordered_json& d) {
        const std::string family = d.at("family").get<std::string>();
        if (family == "cartan") return cartan(d.at("m").get<int>());
        if (family == "ot") return fkm(build_ozeki_takeuchi_system(d.at("r").get<int>()));
        if (family == "fkm") return fkm(build_standard_system(d.at("m").get<int>(), d.at("r").get<int>()));
        throw RangeError("unknown polynomial family '" + family + "'");
    }

    nlohmann::ordered_json descriptor() const {
        nlohmann::ordered_json d;
        if (kind_ == FamilyKind::Cartan) {
            d["family"] = "cartan";
            d["m"] = algebra_dim_;
            d["tag"] = "cayley-dickson";
        } else if (system_->tag == CliffordTag::OzekiTakeuchi) {
            d["family"] = "ot";
            d["m"] = system_->m;
            d["r"] = system_->r;
            d["tag"] = std::string(to_string(system_->tag));
        } else {
            d["family"] = "fkm";
            d["m"] = system_->m;
            d["r"] = system_->r;
            d["tag"] = std::string(to_string(system_->tag));
        }
        return d;
    }

    FamilyKind kind() const noexcept { return kind_; }
    int degree() const noexcept { return g_; }
    int m1() const noexcept { return m1_; }
    int m2() const noexcept { return m2_; }
    std::size_t ambient_dim() const noexcept { return dim_; }
    /// Dimension of the level hypersurfaces in the unit sphere.
    int n() const noexcept { return static_cast<int>(dim_) - 2; }
    const CliffordSystem* clifford() const noexcept { return system_ ? &*system_ : nullptr; }
    const SparsePolynomial& monomial_form() const noexcept { return monomial_; }
    std::string name() const {
        const auto d = descriptor();
        std::string s = d["family"].get<std::string>() + " m=" + std::to_string(d["m"].get<int>());
        if (d.contains("r")) s += " r=" + std::to_string(d["r"].get<int>());
        return s;
    }

    double eval(std::span<const double> x) const {
        check_dim(x);
        if (kind_ == FamilyKind::FKM) {
            const double z2 = dot(x, x);
            double s = 0.0;
            for (const auto& a : system_->generators) {
                const double ap = a.matrix().bilinear(x, x);
                s += ap * ap;
            }
            return z2 * z2 - 2.0 * s;
        }
        return cartan_closed(x);
    }

    Vector grad(std::span<const double> x) const {
        check_dim(x);
        if (kind_ == FamilyKind::Cartan) return monomial_.gradient(x);
        // DF/4 = |z|^2 z - 2 sum <A_p z, z> A_p z
        const double z2 = dot(x, x);
        Vector out = scaled(x, z2);
        for (const auto& a : system_->generators) {
            const Vector az = a.matrix() * x;
            out = axpy(out, -2.0 * dot(az, x), az);
        }
        return scaled(out, 4.0);
    }

    SymmetricMatrix hessian(std::span<const double> x) const {
        check_dim(x);
        if (kind_ == FamilyKind::Cartan) return monomial_.hessian(x);
        // D^2F/4 = |z|^2 I + 2 z z^t - 2 sum <A_p z,z> A_p - 4 sum A_p z z^t A_p
        const double z2 = dot(x, x);
        Matrix h = Matrix::identity(dim_) * z2 + Matrix::outer(x, x) * 2.0;
        for (const auto& a : system_->generators) {
            const Vector az = a.matrix() * x;
            h -= a.matrix() * (2.0 * dot(az, x));
            h -= Matrix::outer(az, az) * 4.0;
        }
        h *= 4.0;
        return SymmetricMatrix(h, SymmetryPolicy::Symmetrize);
    }

private:
    IsoPolynomial() = default;

    void check_dim(std::span<const double> x) const {
        if (x.size() != dim_)
            throw RangeError("point has dimension " + std::to_string(x.size()) + ", polynomial expects " +
                             std::to_string(dim_));
    }

    // x = (u, v, X, Y, Z), each of X, Y, Z taking m consecutive coordinates.
    double cartan_closed(std::span<const double> x) const {
        const std::size_t m = static_cast<std::size_t>(algebra_dim_);
        const double u = x[0], v = x[1];
        const auto X = x.subspan(2, m), Y = x.subspan(2 + m, m), Z = x.subspan(2 + 2 * m, m);
        const double x2 = dot(X, X), y2 = dot(Y, Y), z2 = dot(Z, Z);
        const double s3 = std::sqrt(3.0);
        return u * u * u - 3.0 * u * v * v + 1.5 * u * (x2 + y2 - 2.0 * z2) + 1.5 * s3 * v * (x2 - y2) +
               3.0 * s3 * cd::real_triple<double>(X, Y, Z);
    }

    SparsePolynomial build_cartan_monomials() const {
        const std::size_t m = static_cast<std::size_t>(algebra_dim_);
        const std::size_t d = dim_;
        auto var = [d](std::size_t i) { return SparsePolynomial::variable(d, i); };
        auto block = [&](std::size_t off) {
            std::vector<SparsePolynomial> b;
            for (std::size_t k = 0; k < m; ++k) b.push_back(var(off + k));
            return b;
        };
        auto square = [](const std::vector<SparsePolynomial>& b) {
            SparsePolynomial s;
            for (const auto& c : b) s += c * c;
            return s;
        };
        const SparsePolynomial u = var(0), v = var(1);
        const auto X = block(2), Y = block(2 + m), Z = block(2 + 2 * m);
        const SparsePolynomial x2 = square(X), y2 = square(Y), z2 = square(Z);
        const double s3 = std::sqrt(3.0);
        using Span = std::span<const SparsePolynomial>;
        return u * u * u - 3.0 * (u * v * v) + 1.5 * (u * (x2 + y2 - 2.0 * z2)) +
               (1.5 * s3) * (v * (x2 - y2)) +
               (3.0 * s3) * cd::real_triple<SparsePolynomial>(Span(X), Span(Y), Span(Z));
    }

    SparsePolynomial build_fkm_monomials() const {
        const std::size_t d = dim_;
        auto quadratic = [d](const Matrix& a) {
            SparsePolynomial q(d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    if (a(i, j) != 0.0)
                        q += a(i, j) * (SparsePolynomial::variable(d, i) * SparsePolynomial::variable(d, j));
            return q;
        };
        const SparsePolynomial z2 = quadratic(Matrix::identity(d));
        SparsePolynomial out = z2 * z2;
        for (const auto& a : system_->generators) {
            const SparsePolynomial q = quadratic(a.matrix());
            out -= 2.0 * (q * q);
        }
        return out;
    }

    // Monomial and closed forms must agree, and F must be homogeneous of degree g.
    void cross_check() const {
        if (monomial_.degree() != g_) throw ConstructionError("monomial form has the wrong degree");
        for (std::size_t s = 0; s < kConstructionSamples; ++s) {
            const double radius = random_uniform(kConstructionSeed, 2 * s, 0.5, 2.0);
            const Vector x = scaled(random_sphere_point(kConstructionSeed, 2 * s + 1, dim_), radius);
            const double scale = std::max(1.0, std::pow(radius, g_));
            const double closed = eval(x);
            if (std::abs(closed - monomial_.evaluate(x)) > kConstructionTolerance * scale)
                throw ConstructionError(name() + ": monomial form disagrees with the closed form");
            const double lambda = 0.5 + 1.5 * static_cast<double>(s) / kConstructionSamples;
            const double hom = eval(scaled(x, lambda)) - std::pow(lambda, g_) * closed;
            if (std::abs(hom) > kConstructionTolerance * scale * std::max(1.0, std::pow(lambda, g_)))
                throw ConstructionError(name() + ": closed form is not homogeneous of degree " +
                                        std::to_string(g_));
        }
    }

    FamilyKind kind_ = FamilyKind::FKM;
    int g_ = 0;
    int m1_ = 0;
    int m2_ = 0;
    int algebra_dim_ = 0;
    std::size_t dim_ = 0;
    std::optional<CliffordSystem> system_;
    SparsePolynomial monomial_;
};

/// Residuals of the Cartan-Muenzner equations at x:
/// (|DF|^2 - g^2 |x|^{2g-2},  tr D^2F - (g^2/2)(m2 - m1) |x|^{g-2}).
inline std::pair<double, double> cm_residuals(const IsoPolynomial& p, std::span<const double> x) {
    const double r = norm(x);
    const double g = p.degree();
    const Vector df = p.grad(x);
    const double first = dot(df, df) - g * g * std::pow(r, 2 * g - 2);
    const double second = p.hessian(x).trace() - 0.5 * g * g * (p.m2() - p.m1()) * std::pow(r, g - 2);
    return {first, second};
}

/// Natural magnitudes of the two Cartan-Muenzner terms, for relative residuals.
inline std::pair<double, double> cm_scales(const IsoPolynomial& p, std::span<const double> x) {
    const double r = norm(x);
    const int g = p.degree();
    return {std::max(1.0, std::pow(r, 2 * g - 2)), std::max(1.0, std::pow(r, g - 2))};
}

/// sigma_k of the Hessian.
inline double delta_k(const IsoPolynomial& p, std::span<const double> x, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > p.ambient_dim())
        throw RangeError("delta_k needs 1 <= k <= " + std::to_string(p.ambient_dim()) + ", got " +
                         std::to_string(k));
    return sigma_k(p.hessian(x), static_cast<std::size_t>(k));
}

/// Homogenized closed forms for rho_k(D^2F), k = 2, 3, 4, in terms of
/// F(x) and |x|. The k = 4 form is evaluated as written for every n.
inline double hidden_rho_closed_form(const IsoPolynomial& p, int k, double f, double r) {
    const double g = p.degree();
    const double n = p.n();
    const double d = p.m2() - p.m1();
    const auto pw = [r](double e) { return std::pow(r, e); };
    switch (k) {
        case 2:
            return -(std::pow(g, 3) / 2.0) * (g - 2.0) * d * f * pw(g - 4.0) +
                   g * g * (g - 1.0) * (n + 2.0 * g - 2.0) * pw(2.0 * g - 4.0);
        case 3:
            return (std::pow(g, 4) / 4.0) * (g - 2.0) * (g - 4.0) * d * f * f * pw(g - 6.0) -
                   n * std::pow(g, 3) * (g - 1.0) * (g - 2.0) * f * pw(2.0 * g - 6.0) +
                   (std::pow(g, 4) / 4.0) * (g * g - 2.0) * d * pw(3.0 * g - 6.0);
        case 4:
            return -(std::pow(g, 5) / 12.0) * (g - 2.0) * (g - 4.0) * (g - 6.0) * d * f * f * f * pw(g - 8.0) +
                   (2.0 * n / 3.0) * std::pow(g, 4) * (g - 1.0) * (g - 2.0) * (g - 3.0) * f * f * pw(2.0 * g - 8.0) -
                   (std::pow(g, 5) / 12.0) * (g - 2.0) * (5.0 * g * g - 2.0 * g - 12.0) * d * f * pw(3.0 * g - 8.0) +
                   ((n / 3.0) * std::pow(g, 4) * (g - 1.0) * (g * g + g - 3.0) + 2.0 * std::pow(g, 4) * std::pow(g - 1.0, 4)) *
                       pw(4.0 * g - 8.0);
        default: break;
    }
    throw RangeError("closed form for rho_k exists only for k = 2, 3, 4, got " + std::to_string(k));
}

/// rho_k(D^2F(x)) minus its homogenized closed form.
inline double hidden_rho_residual(const IsoPolynomial& p, std::span<const double> x, int k) {
    const double closed = hidden_rho_closed_form(p, k, p.eval(x), norm(x));
    return rho_k(p.hessian(x), static_cast<std::size_t>(k)) - closed;
}

/// |grad f|^2 = b(f) and Delta f = a(f) for f = F restricted to the unit sphere.
struct TransnormalProfile {
    int g = 0;
    int n = 0;
    int m1 = 0;
    int m2 = 0;

    static TransnormalProfile of(const IsoPolynomial& p) { return {p.degree(), p.n(), p.m1(), p.m2()}; }

    double b(double f) const { return static_cast<double>(g * g) * (1.0 - f * f); }
    double b_prime(double f) const { return -2.0 * g * g * f; }
    double a(double f) const { return 0.5 * g * g * (m2 - m1) - static_cast<double>(g) * (n + g) * f; }
};

enum class ConvertDirection { ToH, ToDelta };

/// Converts between (Delta_1 f, ..., Delta_j f), the elementary symmetric
/// functions of the spherical Hessian, and (H_1, ..., H_j), the elementary
/// symmetric functions of the shape operator of the level through f.
///
///   Delta_j = (-sqrt b)^j H_j + (-sqrt b)^{j-1} (b'/2) H_{j-1},   H_0 = 1
///   H_j = (2 sqrt b)^{-j} (sum_{i=1}^{j} (-1)^i 2^i b'^{j-i} Delta_i + b'^j)
inline std::vector<double> delta_H_convert(std::span<const double> values, const TransnormalProfile& prof,
                                           double f, ConvertDirection dir) {
    const double b = prof.b(f);
    if (!(b > 0.0)) throw FocalPointError("level " + std::to_string(f) + " is focal (b(f) <= 0)", f);
    const double bp = prof.b_prime(f);
    const double sb = std::sqrt(b);
    const std::size_t j_max = values.size();
    std::vector<double> out(j_max);
    if (dir == ConvertDirection::ToDelta) {
        for (std::size_t j = 1; j <= j_max; ++j) {
            const double h_prev = j == 1 ? 1.0 : values[j - 2];
            out[j - 1] = std::pow(-sb, static_cast<double>(j)) * values[j - 1] +
                         std::pow(-sb, static_cast<double>(j - 1)) * 0.5 * bp * h_prev;
        }
        return out;
    }
    for (std::size_t j = 1; j <= j_max; ++j) {
        double s = std::pow(bp, static_cast<double>(j));
        for (std::size_t i = 1; i <= j; ++i)
            s += ((i % 2 == 0) ? 1.0 : -1.0) * std::pow(2.0, static_cast<double>(i)) *
                 std::pow(bp, static_cast<double>(j - i)) * values[i - 1];
        out[j - 1] = s / std::pow(2.0 * sb, static_cast<double>(j));
    }
    return out;
}

}  // namespace isopar
