#pragma once

// Dense symmetric matrices, their spectra, and the symmetric-function
// identities (elementary symmetric polynomials, power sums, Newton's
// identities) used throughout the library.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "isopar/dense.hpp"
#include "isopar/errors.hpp"

namespace isopar {

/// Eigenvalues within this absolute distance are reported as one multiplicity group.
inline constexpr double kClusterTolerance = 1e-6;

enum class SymmetryPolicy { Symmetrize, Reject };

/// Square real matrix whose (i,j) and (j,i) entries are bitwise equal.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(std::size_t order) : m_(order, order) {
        if (order == 0) throw RangeError("symmetric matrix order must be at least 1");
    }

    explicit SymmetricMatrix(const Matrix& m, SymmetryPolicy policy = SymmetryPolicy::Symmetrize)
        : m_(m) {
        if (!m.is_square()) throw RangeError("symmetric matrix must be square");
        if (m.rows() == 0) throw RangeError("symmetric matrix order must be at least 1");
        const std::size_t n = m.rows();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (policy == SymmetryPolicy::Reject && m(i, j) != m(j, i))
                    throw RangeError("matrix is not symmetric at (" + std::to_string(i) + "," +
                                     std::to_string(j) + ")");
                const double v = 0.5 * (m(i, j) + m(j, i));
                m_(i, j) = v;
                m_(j, i) = v;
            }
    }

    static SymmetricMatrix identity(std::size_t n) {
        return SymmetricMatrix(Matrix::identity(n), SymmetryPolicy::Reject);
    }
    static SymmetricMatrix diagonal(std::span<const double> d) {
        return SymmetricMatrix(Matrix::diagonal(d), SymmetryPolicy::Reject);
    }

    std::size_t order() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& matrix() const noexcept { return m_; }

    /// Writes both mirrored entries.
    void set(std::size_t i, std::size_t j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    double trace() const { return m_.trace(); }
    double frobenius_norm() const { return m_.frobenius_norm(); }

    /// Principal submatrix on the given (sorted) index set.
    SymmetricMatrix principal(std::span<const std::size_t> idx) const {
        Matrix sub(idx.size(), idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = 0; b < idx.size(); ++b) sub(a, b) = m_(idx[a], idx[b]);
        return SymmetricMatrix(sub, SymmetryPolicy::Reject);
    }

private:
    Matrix m_;
};

/// Sorted (descending) eigenvalues together with their multiplicity grouping.
struct Spectrum {
    struct Group {
        double value;
        std::size_t count;
    };

    std::vector<double> values;
    std::vector<Group> groups;

    static Spectrum from_values(std::vector<double> v, double tol = kClusterTolerance) {
        std::sort(v.begin(), v.end(), std::greater<>());
        Spectrum s;
        s.values = std::move(v);
        // A new group starts whenever the gap to the previous value exceeds tol.
        std::size_t start = 0;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const bool last = i + 1 == s.values.size();
            if (last || s.values[i] - s.values[i + 1] > tol) {
                double mean = 0.0;
                for (std::size_t k = start; k <= i; ++k) mean += s.values[k];
                mean /= static_cast<double>(i - start + 1);
                s.groups.push_back({mean, i - start + 1});
                start = i + 1;
            }
        }
        return s;
    }

    std::size_t size() const noexcept { return values.size(); }
};

struct EigenDecomposition {
    Spectrum spectrum;
    /// Column k is the unit eigenvector for spectrum.values[k].
    Matrix vectors;
    std::size_t sweeps = 0;
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

}  // namespace detail

inline constexpr std::size_t kJacobiSweepBudget = 100;
inline constexpr double kJacobiRelativeTolerance = 1e-12;

/// Cyclic Jacobi rotations. Stops once the off-diagonal Frobenius norm drops
/// below 1e-12 times the Frobenius norm of the input.
inline EigenDecomposition eigendecompose(const SymmetricMatrix& input,
                                         std::size_t sweep_budget = kJacobiSweepBudget) {
    const std::size_t n = input.order();
    Matrix a = input.matrix();
    Matrix v = Matrix::identity(n);
    const double scale = input.frobenius_norm();
    if (!std::isfinite(scale)) throw NonFiniteError("eigensolve: matrix has non-finite entries");
    const double target = kJacobiRelativeTolerance * scale;

    std::size_t sweep = 0;
    double off = detail::off_diagonal_norm(a);
    while (off > target) {
        if (sweep == sweep_budget)
            throw SolverError("Jacobi eigensolver did not converge; off-diagonal norm " +
                                  std::to_string(off),
                              off);
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        off = detail::off_diagonal_norm(a);
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition out;
    std::vector<double> values(n);
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    out.spectrum = Spectrum::from_values(std::move(values));
    out.sweeps = sweep;
    return out;
}

inline Spectrum eigensolve(const SymmetricMatrix& m) { return eigendecompose(m).spectrum; }

/// e_0..e_k of a list of values.
inline std::vector<double> elementary_symmetric(std::span<const double> values, std::size_t k) {
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (double x : values)
        for (std::size_t j = std::min(k, values.size()); j >= 1; --j) e[j] += x * e[j - 1];
    return e;
}

inline double power_sum(std::span<const double> values, std::size_t k) {
    double s = 0.0;
    for (double x : values) s += std::pow(x, static_cast<double>(k));
    return s;
}

/// k-th elementary symmetric polynomial of the eigenvalues.
inline double sigma_k(const SymmetricMatrix& m, std::size_t k) {
    if (k > m.order())
        throw RangeError("sigma_k: k=" + std::to_string(k) + " exceeds order " +
                         std::to_string(m.order()));
    if (k == 0) return 1.0;
    const Spectrum s = eigensolve(m);
    return elementary_symmetric(s.values, k)[k];
}

inline constexpr std::size_t kMaxMinorOrder = 12;

/// Sum of principal k-minors. Exponential in the order, so limited to small matrices.
inline double sigma_k_by_minors(const SymmetricMatrix& m, std::size_t k) {
    const std::size_t n = m.order();
    if (k > n) throw RangeError("sigma_k_by_minors: k exceeds order");
    if (n > kMaxMinorOrder) throw RangeError("sigma_k_by_minors: order too large for enumeration");
    if (k == 0) return 1.0;
    double total = 0.0;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        total += determinant(m.principal(idx).matrix());
        // next k-subset in lexicographic order
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return total;
}

/// tr(M^k) by repeated multiplication.
inline double rho_k(const SymmetricMatrix& m, std::size_t k) {
    if (k == 0) return static_cast<double>(m.order());
    Matrix p = m.matrix();
    for (std::size_t i = 1; i < k; ++i) p = p * m.matrix();
    const double r = p.trace();
    if (!std::isfinite(r)) throw NonFiniteError("rho_k overflowed");
    return r;
}

/// (rho_1..rho_k) -> (sigma_1..sigma_k) via k sigma_k = sum_i (-1)^(i-1) sigma_(k-i) rho_i.
inline std::vector<double> newton_sigma_from_rho(std::span<const double> rho, std::size_t n) {
    const std::size_t k = rho.size();
    if (k == 0) throw RangeError("newton_sigma_from_rho: empty input");
    if (k > n) throw RangeError("newton_sigma_from_rho: more power sums than variables");
    std::vector<double> sigma(k + 1, 0.0);
    sigma[0] = 1.0;
    for (std::size_t j = 1; j <= k; ++j) {
        double s = 0.0;
        for (std::size_t i = 1; i <= j; ++i)
            s += ((i % 2 == 1) ? 1.0 : -1.0) * sigma[j - i] * rho[i - 1];
        sigma[j] = s / static_cast<double>(j);
    }
    return {sigma.begin() + 1, sigma.end()};
}

/// Inverse of newton_sigma_from_rho.
inline std::vector<double> newton_rho_from_sigma(std::span<const double> sigma_in, std::size_t n) {
    const std::size_t k = sigma_in.size();
    if (k == 0) throw RangeError("newton_rho_from_sigma: empty input");
    if (k > n) throw RangeError("newton_rho_from_sigma: more coefficients than variables");
    std::vector<double> sigma(k + 1);
    sigma[0] = 1.0;
    std::copy(sigma_in.begin(), sigma_in.end(), sigma.begin() + 1);
    std::vector<double> rho(k + 1, 0.0);
    for (std::size_t j = 1; j <= k; ++j) {
        double s = static_cast<double>(j) * sigma[j];
        for (std::size_t i = 1; i < j; ++i)
            s -= ((i % 2 == 1) ? 1.0 : -1.0) * sigma[j - i] * rho[i];
        rho[j] = ((j % 2 == 1) ? 1.0 : -1.0) * s;
    }
    return {rho.begin() + 1, rho.end()};
}

/// Imaginary parts above this bound mean the moments do not come from a real spectrum.
inline constexpr double kMomentImaginaryTolerance = 1e-6;

struct RecoveredSpectrum {
    Spectrum spectrum;
    /// Largest |Im| among the (cluster-averaged) roots.
    double imaginary_residue = 0.0;
};

/// Recovers a multiset of n reals from its first n power sums: Newton's
/// identities give the characteristic polynomial, whose companion matrix is
/// then diagonalized.
inline RecoveredSpectrum spectrum_from_moments(std::span<const double> rho, std::size_t n) {
    if (n == 0 || rho.size() != n)
        throw RangeError("spectrum_from_moments: need exactly n power sums");
    const std::vector<double> sigma = newton_sigma_from_rho(rho, n);

    // monic p(x) = x^n + c_(n-1) x^(n-1) + ... + c_0 with c_(n-k) = (-1)^k sigma_k
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n));
    for (std::size_t i = 1; i < n; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double c = ((k % 2 == 0) ? 1.0 : -1.0) * sigma[k - 1];
        companion(static_cast<Eigen::Index>(n - k), static_cast<Eigen::Index>(n - 1)) = -c;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw SolverError("companion eigensolve failed", 0.0);
    std::vector<std::complex<double>> roots;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
        roots.push_back(solver.eigenvalues()[i]);

    // A root of multiplicity k is perturbed by O(eps^(1/k)); the mean of the
    // perturbed cluster is accurate to O(eps), so nearby roots are merged
    // (single linkage) and replaced by their mean.
    const std::size_t count = roots.size();
    std::vector<std::size_t> label(count);
    for (std::size_t i = 0; i < count; ++i) label[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
        while (label[i] != i) i = label[i] = label[label[i]];
        return i;
    };
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) {
            const double radius = 1e-3 * std::max(1.0, std::abs(roots[i]));
            if (std::abs(roots[i] - roots[j]) < radius) label[find(i)] = find(j);
        }
    std::vector<std::complex<double>> sum(count, 0.0);
    std::vector<std::size_t> members(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
        sum[find(i)] += roots[i];
        ++members[find(i)];
    }

    RecoveredSpectrum out;
    std::vector<double> values;
    values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::complex<double> mean = sum[find(i)] / static_cast<double>(members[find(i)]);
        out.imaginary_residue = std::max(out.imaginary_residue, std::abs(mean.imag()));
        values.push_back(mean.real());
    }
    if (out.imaginary_residue > kMomentImaginaryTolerance)
        throw IllPosedMomentsError("power sums are not realizable by a real spectrum; |Im| = " +
                                       std::to_string(out.imaginary_residue),
                                   out.imaginary_residue);
    out.spectrum = Spectrum::from_values(std::move(values));
    return out;
}

inline constexpr double kVandermondeMinGap = 1e-8;

/// Solves sum_j nodes[j]^i w[j] = moments[i] for i = 0..g-1.
/// Each w[j] is the moment functional applied to the j-th Lagrange basis
/// polynomial of the nodes.
inline std::vector<double> vandermonde_solve(std::span<const double> nodes,
                                             std::span<const double> moments) {
    const std::size_t g = nodes.size();
    if (g == 0 || moments.size() != g)
        throw RangeError("vandermonde_solve: nodes and moments must have equal nonzero length");
    double min_gap = INFINITY;
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = i + 1; j < g; ++j)
            min_gap = std::min(min_gap, std::abs(nodes[i] - nodes[j]));
    if (min_gap <= kVandermondeMinGap)
        throw ConditioningError("vandermonde_solve: nodes closer than " +
                                    std::to_string(kVandermondeMinGap) +
                                    " (gap " + std::to_string(min_gap) + ")",
                                min_gap);

    std::vector<double> w(g, 0.0);
    for (std::size_t j = 0; j < g; ++j) {
        // coefficients (ascending) of prod_{k != j} (x - nodes[k]) / (nodes[j] - nodes[k])
        std::vector<double> coeff{1.0};
        for (std::size_t k = 0; k < g; ++k) {
            if (k == j) continue;
            const double denom = nodes[j] - nodes[k];
            std::vector<double> next(coeff.size() + 1, 0.0);
            for (std::size_t i = 0; i < coeff.size(); ++i) {
                next[i + 1] += coeff[i] / denom;
                next[i] -= nodes[k] * coeff[i] / denom;
            }
            coeff = std::move(next);
        }
        for (std::size_t i = 0; i < g; ++i) w[j] += coeff[i] * moments[i];
    }
    return w;
}

}  // namespace isopar
