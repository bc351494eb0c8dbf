#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "auon/matrix.hpp"

namespace auon::rng {

/// Seeded sampler with hand-rolled transforms so that streams are identical
/// across standard-library implementations (std::normal_distribution is not
/// portable bit-for-bit).
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : gen_(seed) {}

    /// Uniform in (0, 1], 53-bit resolution.
    double uniform01() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Standard Cauchy, clipped to [-clip, clip].
    double clipped_cauchy(double clip) {
        const double t = std::tan(std::numbers::pi * (uniform01() - 0.5));
        return std::clamp(t, -clip, clip);
    }

    /// Uniform index in [0, n). Modulo bias is negligible for bootstrap use.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double stddev = 1.0) {
    Sampler sampler(seed);
    DenseMatrix m(rows, cols);
    for (double& x : m.data()) {
        x = stddev * sampler.gaussian();
    }
    return m;
}

inline DenseMatrix uniform_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = -1.0,
                                  double hi = 1.0) {
    Sampler sampler(seed);
    DenseMatrix m(rows, cols);
    for (double& x : m.data()) {
        x = sampler.uniform(lo, hi);
    }
    return m;
}

inline DenseMatrix heavy_tail_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double clip = 50.0) {
    Sampler sampler(seed);
    DenseMatrix m(rows, cols);
    for (double& x : m.data()) {
        x = sampler.clipped_cauchy(clip);
    }
    return m;
}

/// Exactly orthogonal (to rounding) n x n matrix: a product of seeded Givens
/// rotations applied to the identity, with random row sign flips.
inline DenseMatrix orthogonal_matrix(std::size_t n, std::uint64_t seed) {
    Sampler sampler(seed);
    DenseMatrix q = identity_matrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (sampler.uniform01() < 0.5) {
            for (std::size_t j = 0; j < n; ++j) {
                q(i, j) = -q(i, j);
            }
        }
    }
    const std::size_t sweeps = 2;
    for (std::size_t s = 0; s < sweeps; ++s) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double theta = sampler.uniform(0.0, 2.0 * std::numbers::pi);
                const double c = std::cos(theta);
                const double sn = std::sin(theta);
                for (std::size_t k = 0; k < n; ++k) {
                    const double xi = q(i, k);
                    const double xj = q(j, k);
                    q(i, k) = c * xi - sn * xj;
                    q(j, k) = sn * xi + c * xj;
                }
            }
        }
    }
    return q;
}

inline std::vector<double> unit_gaussian_vector(std::size_t n, std::uint64_t seed) {
    Sampler sampler(seed);
    std::vector<double> v(n);
    double norm_sq = 0.0;
    for (double& x : v) {
        x = sampler.gaussian();
        norm_sq += x * x;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm > 0.0) {
        for (double& x : v) {
            x /= norm;
        }
    } else {
        v[0] = 1.0;
    }
    return v;
}

}  // namespace auon::rng
