#pragma once

// Symmetric Clifford systems {A_0..A_m} (A_i A_j + A_j A_i = 2 delta_ij I)
// and the orthogonal complex structures that act on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isopar/dense.hpp"
#include "isopar/errors.hpp"
#include "isopar/symmat.hpp"

namespace isopar {

inline constexpr double kCliffordTolerance = 1e-12;

enum class CliffordTag { StandardBlock, OzekiTakeuchi };

inline std::string_view to_string(CliffordTag t) {
    return t == CliffordTag::StandardBlock ? "standard-block" : "ozeki-takeuchi-34r";
}

/// Generators A_0..A_m of order dim = 2r. `r` is the construction parameter
/// (half the dimension for standard systems; the quaternionic block count
/// parameter for Ozeki-Takeuchi systems).
struct CliffordSystem {
    int m = 0;
    int r = 0;
    std::size_t dim = 0;
    std::vector<SymmetricMatrix> generators;
    CliffordTag tag = CliffordTag::StandardBlock;
};

struct CliffordReport {
    double anticommutation_residual = 0.0;
    double orthogonality_residual = 0.0;
    double max_residual() const { return std::max(anticommutation_residual, orthogonality_residual); }
};

/// Max entrywise residual of A_iA_j + A_jA_i - 2 delta_ij I over all pairs.
inline CliffordReport verify_clifford(const CliffordSystem& sys) {
    CliffordReport rep;
    const Matrix id = Matrix::identity(sys.dim);
    const auto& g = sys.generators;
    for (std::size_t i = 0; i < g.size(); ++i) {
        rep.orthogonality_residual = std::max(
            rep.orthogonality_residual, (g[i].matrix() * g[i].matrix() - id).max_abs_entry());
        for (std::size_t j = i + 1; j < g.size(); ++j) {
            const Matrix ac = g[i].matrix() * g[j].matrix() + g[j].matrix() * g[i].matrix();
            rep.anticommutation_residual =
                std::max(rep.anticommutation_residual, ac.max_abs_entry());
        }
    }
    rep.anticommutation_residual = std::max(rep.anticommutation_residual, rep.orthogonality_residual);
    return rep;
}

/// The 4x4 blocks D_0 (right multiplication by i on H) and D_1, D_2, D_3
/// (left multiplication by i, j, k) in the basis (1, i, j, k).
inline Matrix quaternion_block(int k) {
    switch (k) {
        case 0: return {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, -1, 0}};
        case 1: return {{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}};
        case 2: return {{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}};
        case 3: return {{0, 0, 0, -1}, {0, 0, -1, 0}, {0, 1, 0, 0}, {1, 0, 0, 0}};
        default: throw RangeError("quaternion block index must be 0..3");
    }
}

namespace detail {

inline Matrix block_standard_j(std::size_t half) {
    Matrix j(2 * half, 2 * half);
    j.set_block(0, half, -Matrix::identity(half));
    j.set_block(half, 0, Matrix::identity(half));
    return j;
}

inline void require_valid(const CliffordSystem& sys) {
    const CliffordReport rep = verify_clifford(sys);
    if (rep.max_residual() > kCliffordTolerance)
        throw ConstructionError("Clifford relations violated by " + std::to_string(rep.max_residual()));
}

}  // namespace detail

/// Skew-symmetric Clifford system {E_2..E_m} on R^r for the supported m.
inline std::vector<Matrix> skew_clifford_system(int m, int r) {
    if (m < 1) throw ConstructionError("Clifford index m must be at least 1");
    if (r < 1) throw ConstructionError("r must be at least 1");
    std::vector<Matrix> e;
    const auto ur = static_cast<std::size_t>(r);
    if (m == 1) return e;
    if (m == 2) {
        if (r % 2 != 0)
            throw ConstructionError("m=2 needs r divisible by 2 (complex structure block); r=" +
                                    std::to_string(r));
        e.push_back(detail::block_standard_j(ur / 2));
        return e;
    }
    if (m == 3) {
        if (r % 4 != 0)
            throw ConstructionError("m=3 needs r divisible by 4 (quaternion blocks); r=" +
                                    std::to_string(r));
        e.push_back(kron(Matrix::identity(ur / 4), quaternion_block(1)));
        e.push_back(kron(Matrix::identity(ur / 4), quaternion_block(2)));
        return e;
    }
    throw ConstructionError("standard Clifford systems are only built for m <= 3; m=" +
                            std::to_string(m));
}

/// A_0 = diag(I,-I), A_1 = [[0,I],[I,0]], A_j = [[0,-E_j],[E_j,0]].
inline CliffordSystem build_standard_system(int m, int r) {
    const std::vector<Matrix> e = skew_clifford_system(m, r);
    const auto ur = static_cast<std::size_t>(r);
    const Matrix id = Matrix::identity(ur);

    CliffordSystem sys;
    sys.m = m;
    sys.r = r;
    sys.dim = 2 * ur;
    sys.tag = CliffordTag::StandardBlock;

    Matrix a0(2 * ur, 2 * ur);
    a0.set_block(0, 0, id);
    a0.set_block(ur, ur, -id);
    Matrix a1(2 * ur, 2 * ur);
    a1.set_block(0, ur, id);
    a1.set_block(ur, 0, id);
    sys.generators.emplace_back(a0, SymmetryPolicy::Reject);
    sys.generators.emplace_back(a1, SymmetryPolicy::Reject);
    for (const Matrix& ej : e) {
        Matrix aj(2 * ur, 2 * ur);
        aj.set_block(0, ur, -ej);
        aj.set_block(ur, 0, ej);
        sys.generators.emplace_back(aj, SymmetryPolicy::Reject);
    }
    detail::require_valid(sys);
    return sys;
}

/// Order 8r+8 system with blocks ordered (u_0, u_hat, v_0, v_hat) of sizes (4, 4r, 4, 4r).
inline CliffordSystem build_ozeki_takeuchi_system(int r) {
    if (r < 1) throw ConstructionError("Ozeki-Takeuchi system needs r >= 1");
    const auto ur = static_cast<std::size_t>(r);
    const std::size_t half = 4 * ur + 4;

    CliffordSystem sys;
    sys.m = 3;
    sys.r = r;
    sys.dim = 2 * half;
    sys.tag = CliffordTag::OzekiTakeuchi;

    Matrix a0(2 * half, 2 * half);
    a0.set_block(0, half, Matrix::identity(4));
    a0.set_block(half, 0, Matrix::identity(4));
    a0.set_block(4, 4, Matrix::identity(4 * ur));
    a0.set_block(half + 4, half + 4, -Matrix::identity(4 * ur));
    sys.generators.emplace_back(a0, SymmetryPolicy::Reject);
    for (int p = 1; p <= 3; ++p) {
        const Matrix d = kron(Matrix::identity(ur + 1), quaternion_block(p));
        Matrix ap(2 * half, 2 * half);
        ap.set_block(0, half, d);
        ap.set_block(half, 0, -d);
        sys.generators.emplace_back(ap, SymmetryPolicy::Reject);
    }
    detail::require_valid(sys);
    return sys;
}

enum class ComplexTag { BlockStandard, RightMultI, LeftMultI, Custom };

inline std::string_view to_string(ComplexTag t) {
    switch (t) {
        case ComplexTag::BlockStandard: return "block";
        case ComplexTag::RightMultI: return "right-i";
        case ComplexTag::LeftMultI: return "left-i";
        case ComplexTag::Custom: return "custom";
    }
    return "custom";
}

/// Orthogonal skew matrix J with J^2 = -I.
class ComplexStructure {
public:
    /// Validates J^t = -J exactly and J^2 = -I within kCliffordTolerance.
    static ComplexStructure from_matrix(Matrix j, ComplexTag tag = ComplexTag::Custom) {
        if (!j.is_square() || j.rows() % 2 != 0)
            throw ConstructionError("complex structure must be square of even order");
        for (std::size_t a = 0; a < j.rows(); ++a)
            for (std::size_t b = 0; b < j.cols(); ++b)
                if (j(a, b) != -j(b, a)) throw ConstructionError("complex structure is not skew");
        const double sq = (j * j + Matrix::identity(j.rows())).max_abs_entry();
        if (sq > kCliffordTolerance) throw ConstructionError("complex structure does not square to -I");
        return ComplexStructure(std::move(j), tag);
    }

    std::size_t dim() const noexcept { return j_.rows(); }
    const Matrix& matrix() const noexcept { return j_; }
    ComplexTag tag() const noexcept { return tag_; }

    Vector apply(std::span<const double> v) const { return j_ * v; }

private:
    ComplexStructure(Matrix j, ComplexTag tag) : j_(std::move(j)), tag_(tag) {}
    Matrix j_;
    ComplexTag tag_;
};

/// block: [[0,-I],[I,0]]; right-i: diag(D_0,...); left-i: diag(D_1,...).
inline ComplexStructure build_complex_structure(ComplexTag tag, std::size_t dim) {
    if (dim == 0 || dim % 2 != 0) throw ConstructionError("complex structure dimension must be even");
    switch (tag) {
        case ComplexTag::BlockStandard:
            return ComplexStructure::from_matrix(detail::block_standard_j(dim / 2), tag);
        case ComplexTag::RightMultI:
        case ComplexTag::LeftMultI:
            if (dim % 4 != 0)
                throw ConstructionError("quaternionic complex structure needs dim divisible by 4");
            return ComplexStructure::from_matrix(
                kron(Matrix::identity(dim / 4),
                     quaternion_block(tag == ComplexTag::RightMultI ? 0 : 1)),
                tag);
        case ComplexTag::Custom: break;
    }
    throw ConstructionError("custom complex structures must be built from a matrix");
}

enum class Commutation { Commute, Anticommute, Neither };

struct SignedGenerator {
    int sign = 1;
    int index = 0;
    double residual = 0.0;
};

struct CommutationEntry {
    int p = 0;
    Commutation relation = Commutation::Neither;
    double commutator_residual = 0.0;      // |A_p J - J A_p|_max
    double anticommutator_residual = 0.0;  // |A_p J + J A_p|_max
    std::optional<SignedGenerator> right_product;  // A_p J == sign * A_q
    std::optional<SignedGenerator> left_product;   // J A_p == sign * A_q
};

namespace detail {

inline std::optional<SignedGenerator> match_generator(const Matrix& prod, const CliffordSystem& sys) {
    for (std::size_t q = 0; q < sys.generators.size(); ++q)
        for (int sign : {1, -1}) {
            const double res = (prod - static_cast<double>(sign) * sys.generators[q].matrix()).max_abs_entry();
            if (res <= kCliffordTolerance) return SignedGenerator{sign, static_cast<int>(q), res};
        }
    return std::nullopt;
}

}  // namespace detail

/// For each generator: does it commute or anticommute with J, and is A_pJ or JA_p another generator (up to sign)?
inline std::vector<CommutationEntry> check_commutation_table(const CliffordSystem& sys,
                                                             const ComplexStructure& j) {
    if (sys.dim != j.dim()) throw RangeError("Clifford system and complex structure dimensions differ");
    std::vector<CommutationEntry> table;
    for (std::size_t p = 0; p < sys.generators.size(); ++p) {
        const Matrix& a = sys.generators[p].matrix();
        const Matrix aj = a * j.matrix();
        const Matrix ja = j.matrix() * a;
        CommutationEntry e;
        e.p = static_cast<int>(p);
        e.commutator_residual = (aj - ja).max_abs_entry();
        e.anticommutator_residual = (aj + ja).max_abs_entry();
        if (e.commutator_residual <= kCliffordTolerance)
            e.relation = Commutation::Commute;
        else if (e.anticommutator_residual <= kCliffordTolerance)
            e.relation = Commutation::Anticommute;
        e.right_product = detail::match_generator(aj, sys);
        e.left_product = detail::match_generator(ja, sys);
        table.push_back(e);
    }
    return table;
}

}  // namespace isopar
