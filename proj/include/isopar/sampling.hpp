#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "isopar/dense.hpp"

namespace isopar {

inline constexpr std::string_view kGeneratorName = "mt19937_64";

/// Independent generator stream for sample `index` of a run seeded with `seed`.
inline std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

inline Vector gaussian_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(dim);
    for (double& x : v) x = normal(rng);
    return v;
}

/// Normalized standard Gaussian: uniform on the unit sphere.
inline Vector random_sphere_point(std::mt19937_64& rng, std::size_t dim) {
    while (true) {
        Vector v = gaussian_vector(rng, dim);
        const double n = norm(v);
        if (n > 1e-12) return scaled(v, 1.0 / n);
    }
}

inline Vector random_sphere_point(std::uint64_t seed, std::uint64_t index, std::size_t dim) {
    auto rng = sample_stream(seed, index);
    return random_sphere_point(rng, dim);
}

/// Uniform point in the ball of the given radius.
inline Vector random_ball_point(std::uint64_t seed, std::uint64_t index, std::size_t dim,
                                double radius) {
    auto rng = sample_stream(seed, index);
    Vector v = random_sphere_point(rng, dim);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double s = radius * std::pow(u(rng), 1.0 / static_cast<double>(dim));
    return scaled(v, s);
}

inline double random_uniform(std::uint64_t seed, std::uint64_t index, double lo, double hi) {
    auto rng = sample_stream(seed, index);
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace isopar
