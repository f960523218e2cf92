#pragma once

// Cayley-Dickson doubling over an arbitrary commutative ring T. An element of
// the algebra of real dimension 2^k is stored as 2^k consecutive components in
// the basis (1, i, j, k, ...). Dimensions 1, 2, 4, 8 give R, C, H, O.
//
//   (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))

#include <cstddef>
#include <span>
#include <vector>

#include "isopar/errors.hpp"

namespace isopar::cd {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

template <class T>
std::vector<T> conj(std::span<const T> a) {
    std::vector<T> out(a.begin(), a.end());
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = -out[i];
    return out;
}

template <class T>
std::vector<T> add(std::span<const T> a, std::span<const T> b) {
    std::vector<T> out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] + b[i];
    return out;
}

template <class T>
std::vector<T> sub(std::span<const T> a, std::span<const T> b) {
    std::vector<T> out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] - b[i];
    return out;
}

template <class T>
std::vector<T> mul(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size() || !is_power_of_two(a.size()))
        throw RangeError("Cayley-Dickson operands must share a power-of-two dimension");
    if (a.size() == 1) return {a[0] * b[0]};
    const std::size_t h = a.size() / 2;
    const auto p = a.first(h), q = a.subspan(h);
    const auto r = b.first(h), s = b.subspan(h);
    const std::vector<T> rc = conj<T>(r), sc = conj<T>(s);
    const std::vector<T> lo = sub<T>(mul<T>(p, r), mul<T>(std::span<const T>(sc), q));
    const std::vector<T> hi = add<T>(mul<T>(s, p), mul<T>(q, std::span<const T>(rc)));
    std::vector<T> out(lo);
    out.insert(out.end(), hi.begin(), hi.end());
    return out;
}

/// Real part of (x y) z.
template <class T>
T real_triple(std::span<const T> x, std::span<const T> y, std::span<const T> z) {
    const std::vector<T> xy = mul<T>(x, y);
    return mul<T>(std::span<const T>(xy), z)[0];
}

}  // namespace isopar::cd
