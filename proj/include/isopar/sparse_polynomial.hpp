#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "isopar/dense.hpp"
#include "isopar/errors.hpp"
#include "isopar/symmat.hpp"

namespace isopar {

/// Real multivariate polynomial stored as a map from exponent vectors to
/// coefficients. Supports the ring operations needed to expand the
/// isoparametric polynomials, plus exact evaluation of value, gradient and
/// Hessian.
class SparsePolynomial {
public:
    using Exponent = std::vector<std::uint8_t>;

    struct Term {
        double coefficient;
        Exponent exponent;
    };

    SparsePolynomial() = default;
    explicit SparsePolynomial(std::size_t vars) : vars_(vars) {}

    static SparsePolynomial constant(std::size_t vars, double c) {
        SparsePolynomial p(vars);
        if (c != 0.0) p.terms_[Exponent(vars, 0)] = c;
        return p;
    }
    static SparsePolynomial variable(std::size_t vars, std::size_t index, double c = 1.0) {
        SparsePolynomial p(vars);
        Exponent e(vars, 0);
        e.at(index) = 1;
        p.terms_[e] = c;
        return p;
    }

    std::size_t variables() const noexcept { return vars_; }
    std::size_t size() const noexcept { return terms_.size(); }

    std::vector<Term> terms() const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& [e, c] : terms_) out.push_back({c, e});
        return out;
    }

    int degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (auto v : e) s += v;
            d = std::max(d, s);
        }
        return d;
    }

    SparsePolynomial& operator+=(const SparsePolynomial& o) {
        adopt_vars(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    SparsePolynomial& operator-=(const SparsePolynomial& o) {
        adopt_vars(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    SparsePolynomial& operator*=(double s) {
        if (s == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= s;
        return *this;
    }

    friend SparsePolynomial operator+(SparsePolynomial a, const SparsePolynomial& b) { return a += b; }
    friend SparsePolynomial operator-(SparsePolynomial a, const SparsePolynomial& b) { return a -= b; }
    friend SparsePolynomial operator-(SparsePolynomial a) { return a *= -1.0; }
    friend SparsePolynomial operator*(SparsePolynomial a, double s) { return a *= s; }
    friend SparsePolynomial operator*(double s, SparsePolynomial a) { return a *= s; }

    friend SparsePolynomial operator*(const SparsePolynomial& a, const SparsePolynomial& b) {
        SparsePolynomial out(std::max(a.vars_, b.vars_));
        if (a.vars_ != b.vars_ && !a.terms_.empty() && !b.terms_.empty())
            throw RangeError("polynomial variable count mismatch");
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponent e(ea);
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<std::uint8_t>(e[i] + eb[i]);
                out.add_term(e, ca * cb);
            }
        return out;
    }
    SparsePolynomial& operator*=(const SparsePolynomial& o) { return *this = *this * o; }

    double evaluate(std::span<const double> x) const {
        check_dim(x);
        double total = 0.0;
        for (const auto& [e, c] : terms_) total += c * monomial(e, x);
        return total;
    }

    Vector gradient(std::span<const double> x) const {
        check_dim(x);
        Vector g(vars_, 0.0);
        std::vector<std::size_t> support;
        for (const auto& [e, c] : terms_) {
            support_of(e, support);
            for (std::size_t i : support) g[i] += c * e[i] * monomial_derivative(e, x, i);
        }
        return g;
    }

    SymmetricMatrix hessian(std::span<const double> x) const {
        check_dim(x);
        Matrix h(vars_, vars_);
        std::vector<std::size_t> support;
        Exponent reduced;
        for (const auto& [e, c] : terms_) {
            support_of(e, support);
            for (std::size_t a = 0; a < support.size(); ++a)
                for (std::size_t b = a; b < support.size(); ++b) {
                    const std::size_t i = support[a], j = support[b];
                    double factor;
                    reduced = e;
                    if (i == j) {
                        if (e[i] < 2) continue;
                        factor = static_cast<double>(e[i]) * (e[i] - 1);
                        reduced[i] = static_cast<std::uint8_t>(reduced[i] - 2);
                    } else {
                        factor = static_cast<double>(e[i]) * e[j];
                        --reduced[i];
                        --reduced[j];
                    }
                    const double v = c * factor * monomial(reduced, x);
                    h(i, j) += v;
                    if (i != j) h(j, i) += v;
                }
        }
        return SymmetricMatrix(h, SymmetryPolicy::Reject);
    }

private:
    static double monomial(const Exponent& e, std::span<const double> x) {
        double v = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::uint8_t k = 0; k < e[i]; ++k) v *= x[i];
        return v;
    }
    static double monomial_derivative(const Exponent& e, std::span<const double> x, std::size_t var) {
        double v = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::uint8_t p = i == var ? static_cast<std::uint8_t>(e[i] - 1) : e[i];
            for (std::uint8_t k = 0; k < p; ++k) v *= x[i];
        }
        return v;
    }

    static void support_of(const Exponent& e, std::vector<std::size_t>& out) {
        out.clear();
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] != 0) out.push_back(i);
    }

    void add_term(const Exponent& e, double c) {
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }
    void adopt_vars(const SparsePolynomial& o) {
        if (vars_ == 0) vars_ = o.vars_;
        if (o.vars_ != 0 && o.vars_ != vars_ && !o.terms_.empty())
            throw RangeError("polynomial variable count mismatch");
    }
    void check_dim(std::span<const double> x) const {
        if (x.size() != vars_) throw RangeError("polynomial evaluated at a point of wrong dimension");
    }

    std::size_t vars_ = 0;
    std::map<Exponent, double> terms_;
};

}  // namespace isopar
