#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "auon/matrix.hpp"
#include "auon/random.hpp"

namespace auon::linalg {

inline constexpr double kRankRelativeThreshold = 1e-10;  // sigma_i > threshold * sigma_1 counts toward rank
inline constexpr double kJacobiTolerance = 1e-12;
inline constexpr int kJacobiMaxSweeps = 60;
inline constexpr std::size_t kSvdDimensionCap = 512;
inline constexpr double kPowerIterationTol = 1e-10;
inline constexpr int kPowerIterationMaxIter = 10000;

inline double frobenius_norm(const DenseMatrix& m) {
    double acc = 0.0;
    for (double x : m.data()) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

struct SvdResult {
    DenseMatrix u;              // m x k, orthonormal columns
    std::vector<double> sigma;  // k = min(m, n), non-increasing, non-negative
    DenseMatrix v;              // n x k, orthonormal columns
};

namespace detail {

// One-sided Jacobi on a tall (m >= n) matrix held column-major. Columns of
// `a` are rotated until pairwise inner products fall below the relative
// tolerance; `v` accumulates the right rotations when requested.
inline void jacobi_sweeps(std::vector<double>& a, std::vector<double>* v, std::size_t m, std::size_t n) {
    for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            double* ci = a.data() + i * m;
            for (std::size_t j = i + 1; j < n; ++j) {
                double* cj = a.data() + j * m;
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    alpha += ci[k] * ci[k];
                    beta += cj[k] * cj[k];
                    gamma += ci[k] * cj[k];
                }
                if (std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha * beta)) {
                    continue;
                }
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < m; ++k) {
                    const double xi = ci[k];
                    const double xj = cj[k];
                    ci[k] = c * xi - s * xj;
                    cj[k] = s * xi + c * xj;
                }
                if (v) {
                    double* vi = v->data() + i * n;
                    double* vj = v->data() + j * n;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double xi = vi[k];
                        const double xj = vj[k];
                        vi[k] = c * xi - s * xj;
                        vj[k] = s * xi + c * xj;
                    }
                }
            }
        }
        if (!rotated) break;
    }
}

inline std::vector<std::size_t> descending_order(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    return order;
}

// Replace (near-)null columns of u with an orthonormal completion so the
// factor keeps orthonormal columns even for rank-deficient input.
inline void complete_orthonormal_columns(DenseMatrix& u, const std::vector<double>& sigma) {
    const std::size_t m = u.rows();
    const std::size_t k = u.cols();
    const double sigma_max = sigma.empty() ? 0.0 : sigma.front();
    for (std::size_t j = 0; j < k; ++j) {
        if (sigma[j] > sigma_max * 1e-14 && sigma[j] > 0.0) {
            continue;
        }
        bool placed = false;
        for (std::size_t basis = 0; basis < m && !placed; ++basis) {
            std::vector<double> cand(m, 0.0);
            cand[basis] = 1.0;
            for (std::size_t prev = 0; prev < j; ++prev) {
                double proj = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    proj += cand[r] * u(r, prev);
                }
                for (std::size_t r = 0; r < m; ++r) {
                    cand[r] -= proj * u(r, prev);
                }
            }
            double norm = 0.0;
            for (double x : cand) {
                norm += x * x;
            }
            norm = std::sqrt(norm);
            if (norm > 0.5) {
                for (std::size_t r = 0; r < m; ++r) {
                    u(r, j) = cand[r] / norm;
                }
                placed = true;
            }
        }
        if (!placed) {
            throw std::runtime_error("svd_jacobi: failed to complete orthonormal basis");
        }
    }
}

inline SvdResult svd_jacobi_tall(const DenseMatrix& input) {
    const std::size_t m = input.rows();
    const std::size_t n = input.cols();
    std::vector<double> a(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[j * m + i] = input(i, j);
        }
    }
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        v[i * n + i] = 1.0;
    }

    jacobi_sweeps(a, &v, m, n);

    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            norm += a[j * m + k] * a[j * m + k];
        }
        sigma[j] = std::sqrt(norm);
    }

    const auto order = descending_order(sigma);
    SvdResult out{DenseMatrix(m, n), std::vector<double>(n), DenseMatrix(n, n)};
    for (std::size_t dst = 0; dst < n; ++dst) {
        const std::size_t src = order[dst];
        out.sigma[dst] = sigma[src];
        const double inv = sigma[src] > 0.0 ? 1.0 / sigma[src] : 0.0;
        for (std::size_t r = 0; r < m; ++r) {
            out.u(r, dst) = a[src * m + r] * inv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            out.v(r, dst) = v[src * n + r];
        }
    }
    complete_orthonormal_columns(out.u, out.sigma);
    return out;
}

inline std::vector<double> singular_values_tall(const DenseMatrix& input) {
    const std::size_t m = input.rows();
    const std::size_t n = input.cols();
    std::vector<double> a(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[j * m + i] = input(i, j);
        }
    }
    jacobi_sweeps(a, nullptr, m, n);
    std::vector<double> sigma(n);
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            norm += a[j * m + k] * a[j * m + k];
        }
        sigma[j] = std::sqrt(norm);
    }
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
    return sigma;
}

inline void check_svd_cap(const DenseMatrix& m) {
    if (std::min(m.rows(), m.cols()) > kSvdDimensionCap) {
        throw std::invalid_argument("svd_jacobi: min(rows, cols) exceeds cap of " +
                                    std::to_string(kSvdDimensionCap));
    }
}

}  // namespace detail

/// Thin SVD via one-sided Jacobi. Factors have orthonormal columns even for
/// rank-deficient input; singular values are sorted non-increasing.
inline SvdResult svd_jacobi(const DenseMatrix& m) {
    detail::check_svd_cap(m);
    if (m.rows() >= m.cols()) {
        return detail::svd_jacobi_tall(m);
    }
    SvdResult t = detail::svd_jacobi_tall(transpose(m));
    return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

/// Singular values only (skips accumulating the factors).
inline std::vector<double> singular_values(const DenseMatrix& m) {
    detail::check_svd_cap(m);
    if (m.rows() >= m.cols()) {
        return detail::singular_values_tall(m);
    }
    return detail::singular_values_tall(transpose(m));
}

struct SpectralNormEstimate {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Power iteration on m^T m. The start vector is a fixed-seed unit Gaussian,
/// so results are deterministic. Non-convergence is reported, not thrown;
/// the last estimate stays usable for benchmarking.
inline SpectralNormEstimate spectral_norm_estimate(const DenseMatrix& m, double tol = kPowerIterationTol,
                                                   int max_iter = kPowerIterationMaxIter) {
    if (tol <= 0.0) {
        throw std::invalid_argument("spectral_norm: tol must be positive");
    }
    constexpr std::uint64_t kStartVectorSeed = 0x9e3779b97f4a7c15ULL;
    std::vector<double> v = rng::unit_gaussian_vector(m.cols(), kStartVectorSeed);
    std::vector<double> w(m.rows());
    SpectralNormEstimate est;
    double prev = -1.0;
    for (int it = 1; it <= max_iter; ++it) {
        est.iterations = it;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const double* row = m.row_ptr(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                acc += row[j] * v[j];
            }
            w[i] = acc;
        }
        double wnorm = 0.0;
        for (double x : w) {
            wnorm += x * x;
        }
        wnorm = std::sqrt(wnorm);
        est.value = wnorm;
        if (wnorm == 0.0) {
            est.converged = true;  // start vector lies in the null space; norm along it is 0
            return est;
        }
        std::vector<double> z(m.cols(), 0.0);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const double* row = m.row_ptr(i);
            const double wi = w[i];
            for (std::size_t j = 0; j < m.cols(); ++j) {
                z[j] += row[j] * wi;
            }
        }
        double znorm = 0.0;
        for (double x : z) {
            znorm += x * x;
        }
        znorm = std::sqrt(znorm);
        for (std::size_t j = 0; j < m.cols(); ++j) {
            v[j] = z[j] / znorm;
        }
        if (prev >= 0.0 && std::abs(est.value - prev) < tol) {
            est.converged = true;
            return est;
        }
        prev = est.value;
    }
    return est;
}

/// Largest singular value; throws if power iteration does not reach `tol`
/// within `max_iter` iterations.
inline double spectral_norm(const DenseMatrix& m, double tol = kPowerIterationTol,
                            int max_iter = kPowerIterationMaxIter) {
    const SpectralNormEstimate est = spectral_norm_estimate(m, tol, max_iter);
    if (!est.converged) {
        throw std::runtime_error("spectral_norm: power iteration did not converge within " +
                                 std::to_string(max_iter) + " iterations (last estimate " +
                                 std::to_string(est.value) + ")");
    }
    return est.value;
}

/// Number of singular values above kRankRelativeThreshold * sigma_1.
inline std::size_t numerical_rank(const std::vector<double>& sigma) {
    if (sigma.empty() || sigma.front() <= 0.0) {
        return 0;
    }
    const double cutoff = kRankRelativeThreshold * sigma.front();
    std::size_t rank = 0;
    for (double s : sigma) {
        if (s > cutoff) ++rank;
    }
    return rank;
}

/// Orthogonal polar factor Q = U V^T restricted to singular triples above the
/// rank threshold. Q^T Q = I on the retained subspace.
inline DenseMatrix polar_factor(const DenseMatrix& m) {
    if (m.is_zero()) {
        throw std::invalid_argument("polar_factor: zero matrix has no polar factor");
    }
    const SvdResult svd = svd_jacobi(m);
    const std::size_t rank = numerical_rank(svd.sigma);
    DenseMatrix u_r(m.rows(), rank);
    DenseMatrix v_r(m.cols(), rank);
    for (std::size_t j = 0; j < rank; ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            u_r(i, j) = svd.u(i, j);
        }
        for (std::size_t i = 0; i < m.cols(); ++i) {
            v_r(i, j) = svd.v(i, j);
        }
    }
    return multiply_abt(u_r, v_r);
}

/// ||g||_F / sqrt(numerical rank): the external scale that decouples step size
/// from orientation.
inline double alpha_scale(const DenseMatrix& g) {
    if (g.is_zero()) {
        throw std::invalid_argument("alpha_scale: zero matrix");
    }
    const std::vector<double> sigma = singular_values(g);
    const std::size_t rank = numerical_rank(sigma);
    return frobenius_norm(g) / std::sqrt(static_cast<double>(rank));
}

}  // namespace auon::linalg
