#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "auon/diagnostics.hpp"
#include "auon/linalg.hpp"
#include "auon/matrix.hpp"
#include "auon/random.hpp"
#include "auon/transforms.hpp"

namespace auon::verify {

enum class EntryDistribution { gaussian, uniform, heavy_tail };

inline const char* distribution_name(EntryDistribution d) {
    switch (d) {
        case EntryDistribution::gaussian: return "gaussian";
        case EntryDistribution::uniform: return "uniform";
        case EntryDistribution::heavy_tail: return "heavy_tail";
    }
    return "?";
}

inline DenseMatrix sample_matrix(std::size_t rows, std::size_t cols, EntryDistribution dist, std::uint64_t seed) {
    switch (dist) {
        case EntryDistribution::gaussian: return rng::gaussian_matrix(rows, cols, seed);
        case EntryDistribution::uniform: return rng::uniform_matrix(rows, cols, seed);
        case EntryDistribution::heavy_tail: return rng::heavy_tail_matrix(rows, cols, seed);
    }
    throw std::logic_error("sample_matrix: unknown distribution");
}

// The battery cycles through this pattern: mostly small shapes, a few large
// ones, all three entry distributions.
struct BatteryShape {
    std::size_t rows, cols;
    int weight;  // samples per 34-sample cycle
};

inline const std::vector<BatteryShape>& battery_shapes() {
    static const std::vector<BatteryShape> shapes{
        {8, 8, 14}, {32, 16, 7}, {16, 32, 7}, {64, 64, 5}, {256, 256, 1},
    };
    return shapes;
}

struct TrustRegionResult {
    std::size_t samples = 0;
    double worst_spectral_norm = 0.0;                          // max sigma_1(U)
    double worst_slack = std::numeric_limits<double>::max();   // min of 1/(r+eps) - sigma_1(U)
    std::size_t violations = 0;
    std::string first_violation;
};

/// Spectral trust region: sigma_1(U) < 1 and sigma_1(U) <= 1/(r + 1e-8) for
/// every sample, with sigma_1 taken from the Jacobi oracle.
inline TrustRegionResult run_trust_region_battery(std::uint64_t seed, std::size_t total = 1020) {
    TrustRegionResult result;
    std::uint64_t draw = seed;
    std::size_t produced = 0;
    while (produced < total) {
        for (const BatteryShape& shape : battery_shapes()) {
            for (int w = 0; w < shape.weight && produced < total; ++w, ++produced) {
                const EntryDistribution dist = static_cast<EntryDistribution>(produced % 3);
                ++draw;
                const DenseMatrix g = sample_matrix(shape.rows, shape.cols, dist, draw);
                const auto [u, report] = transforms::auon_transform(g);
                const double sigma1 = linalg::singular_values(u).front();
                const double radius = 1.0 / (report.rms_statistic + 1e-8);
                result.worst_spectral_norm = std::max(result.worst_spectral_norm, sigma1);
                result.worst_slack = std::min(result.worst_slack, radius - sigma1);
                if (!(sigma1 < 1.0) || !(sigma1 <= radius)) {
                    ++result.violations;
                    if (result.first_violation.empty()) {
                        result.first_violation = "seed=" + std::to_string(draw) + " shape=" +
                                                 std::to_string(shape.rows) + "x" + std::to_string(shape.cols) +
                                                 " dist=" + distribution_name(dist);
                    }
                }
                ++result.samples;
            }
        }
    }
    return result;
}

struct TailCase {
    double a = 0.0;
    std::size_t rows = 0, cols = 0;
    bool diagonal = false;  // one spike per row (diagonal) vs a single spike
    double spectral_norm = 0.0;
    double sqrt_n_bound = 0.0;   // sqrt(N)/cosh(a)
    double paper_bound = 0.0;    // N/cosh(a)
    double radius = 0.0;         // 1/(r + eps)
    bool sqrt_n_holds = false;
    bool paper_holds = false;
    bool radius_holds = false;
};

struct TailResult {
    std::vector<TailCase> cases;

    bool pass() const {
        for (const TailCase& c : cases) {
            if (!c.paper_holds || !c.radius_holds) return false;
            if (c.diagonal && !c.sqrt_n_holds) return false;
        }
        return !cases.empty();
    }
};

inline TailCase evaluate_spike(double a, std::size_t rows, std::size_t cols, bool diagonal) {
    DenseMatrix update(rows, cols);
    if (diagonal) {
        for (std::size_t i = 0; i < std::min(rows, cols); ++i) {
            update(i, i) = a;
        }
    } else {
        update(0, 0) = a;
    }
    const auto [u, r] = transforms::cosh_rms_scale(update);
    TailCase c;
    c.a = a;
    c.rows = rows;
    c.cols = cols;
    c.diagonal = diagonal;
    // these constructions have spectrum {a, a or 0, ...}: sigma_1(U) = a/(r+eps),
    // confirmed against the oracle where the shape is small enough
    c.spectral_norm = (std::min(rows, cols) <= 64) ? linalg::singular_values(u).front()
                                                   : linalg::spectral_norm(u);
    const double n = static_cast<double>(rows * cols);
    const double cosh_a = std::cosh(a);
    c.sqrt_n_bound = std::sqrt(n) / cosh_a;
    c.paper_bound = n / cosh_a;
    c.radius = 1.0 / (r + 1e-8);
    c.sqrt_n_holds = c.spectral_norm <= c.sqrt_n_bound;
    c.paper_holds = c.spectral_norm <= c.paper_bound;
    c.radius_holds = c.radius <= c.sqrt_n_bound;
    return c;
}

/// Spike suppression battery. Every case asserts the trust-region radius form
/// 1/(r+eps) <= sqrt(N)/cosh(a) and the coarser N/cosh(a) bound on sigma_1(U).
/// Diagonal-spike constructions (one isolated spike per row, so sigma_1 of the
/// input is exactly a) additionally satisfy sigma_1(U) <= sqrt(N)/cosh(a) once
/// min(rows, cols) >= a^2.
inline TailResult run_tail_battery(const std::vector<double>& spikes = {2.0, 5.0, 10.0}) {
    TailResult result;
    for (double a : spikes) {
        if (!(a > 0.0)) {
            throw std::invalid_argument("run_tail_battery: spike height must be positive");
        }
        const double required = a * a * 1.3;
        if (required > 512.0) {
            throw std::invalid_argument("run_tail_battery: spike height too large for desk-scale shapes");
        }
        const std::size_t m = std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(required)));
        result.cases.push_back(evaluate_spike(a, m, m, true));
        result.cases.push_back(evaluate_spike(a, 32, 32, false));
        result.cases.push_back(evaluate_spike(a, 256, 256, true));
    }
    return result;
}

struct MarginResult {
    std::size_t samples = 0;
    double worst = 0.0;       // worst observed value of the checked quantity
    double threshold = 0.0;   // pass iff worst <= threshold
    std::size_t violations = 0;
    std::string first_violation;

    bool pass() const { return violations == 0; }
};

/// max entrywise |T(G) - T(cG)| over c in {0.5, 2, 100}.
inline MarginResult run_scale_invariance_battery(std::uint64_t seed, std::size_t count = 100) {
    MarginResult result;
    result.threshold = 1e-6;
    const std::size_t shapes[][2] = {{8, 8}, {16, 32}, {32, 16}, {64, 64}};
    for (std::size_t i = 0; i < count; ++i) {
        const auto& shape = shapes[i % 4];
        const EntryDistribution dist = static_cast<EntryDistribution>(i % 3);
        const DenseMatrix g = sample_matrix(shape[0], shape[1], dist, seed + i);
        const DenseMatrix base = transforms::auon_transform(g).first;
        for (double c : {0.5, 2.0, 100.0}) {
            const DenseMatrix other = transforms::auon_transform(scaled(g, c)).first;
            const double gap = max_abs_difference(base, other);
            result.worst = std::max(result.worst, gap);
            if (gap > result.threshold) {
                ++result.violations;
                if (result.first_violation.empty()) {
                    result.first_violation = "seed=" + std::to_string(seed + i) + " c=" + std::to_string(c);
                }
            }
        }
        ++result.samples;
    }
    return result;
}

/// Relative error of the correlation-energy contraction identity.
inline MarginResult run_correlation_identity_battery(std::uint64_t seed, std::size_t count = 200) {
    MarginResult result;
    result.threshold = 1e-10;
    const std::size_t shapes[][2] = {{8, 8}, {12, 6}, {6, 12}, {16, 16}};
    for (std::size_t i = 0; i < count; ++i) {
        const auto& shape = shapes[i % 4];
        const DenseMatrix g = sample_matrix(shape[0], shape[1], static_cast<EntryDistribution>(i % 3), seed + i);
        const DenseMatrix update = transforms::normalize_frobenius(g);
        const auto [u, report] = transforms::auon_transform(g);
        const double factor = (report.rms_statistic + 1e-8) * (report.rms_statistic + 1e-8);
        const diagnostics::CorrelationEnergy num = diagnostics::correlation_energy(u);
        const diagnostics::CorrelationEnergy den = diagnostics::correlation_energy(update);
        const double trace_err = std::abs(num.trace - den.trace / factor) / (den.trace / factor);
        const double resid_ref = den.isotropy_residual / factor;
        const double resid_err = resid_ref > 0.0 ? std::abs(num.isotropy_residual - resid_ref) / resid_ref : 0.0;
        const double worst = std::max(trace_err, resid_err);
        result.worst = std::max(result.worst, worst);
        if (worst > result.threshold) {
            ++result.violations;
            if (result.first_violation.empty()) {
                result.first_violation = "seed=" + std::to_string(seed + i);
            }
        }
        ++result.samples;
    }
    return result;
}

/// ||U||_F^2 < 1 and ||U||_F <= 1/(r+eps) <= 1/(sqrt(1 + ||update||_F^2/N) + eps).
inline MarginResult run_variance_bound_battery(std::uint64_t seed, std::size_t count = 200) {
    MarginResult result;
    result.threshold = 1.0;  // worst ||U||_F^2 must stay below 1
    const std::size_t shapes[][2] = {{8, 8}, {32, 16}, {16, 32}, {1, 16}};
    for (std::size_t i = 0; i < count; ++i) {
        const auto& shape = shapes[i % 4];
        const DenseMatrix g = sample_matrix(shape[0], shape[1], static_cast<EntryDistribution>(i % 3), seed + i);
        const DenseMatrix update = transforms::normalize_frobenius(g);
        const auto [u, report] = transforms::auon_transform(g);
        const double fro_u = linalg::frobenius_norm(u);
        const double radius = 1.0 / (report.rms_statistic + 1e-8);
        const double fro_update = linalg::frobenius_norm(update);
        const double outer = 1.0 / (std::sqrt(1.0 + fro_update * fro_update / static_cast<double>(g.size())) + 1e-8);
        result.worst = std::max(result.worst, fro_u * fro_u);
        const bool ok = fro_u * fro_u < 1.0 && fro_u <= radius + 1e-15 && radius <= outer + 1e-15;
        if (!ok) {
            ++result.violations;
            if (result.first_violation.empty()) {
                result.first_violation = "seed=" + std::to_string(seed + i);
            }
        }
        ++result.samples;
    }
    return result;
}

/// U must be a single positive multiple of the normalized update.
inline MarginResult run_direction_preservation_battery(std::uint64_t seed, std::size_t count = 100) {
    MarginResult result;
    result.threshold = 1e-11;
    const std::size_t shapes[][2] = {{8, 8}, {5, 9}, {9, 5}};
    for (std::size_t i = 0; i < count; ++i) {
        const auto& shape = shapes[i % 3];
        const DenseMatrix g = sample_matrix(shape[0], shape[1], static_cast<EntryDistribution>(i % 3), seed + i);
        const DenseMatrix update = transforms::normalize_frobenius(g);
        const auto [u, report] = transforms::auon_transform(g);
        const double expected = 1.0 / (report.rms_statistic + 1e-8);
        double worst = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (std::abs(update.data()[k]) > 1e-12) {
                worst = std::max(worst, std::abs(u.data()[k] / update.data()[k] - expected) / expected);
            }
        }
        result.worst = std::max(result.worst, worst);
        if (worst > result.threshold || expected <= 0.0) {
            ++result.violations;
            if (result.first_violation.empty()) {
                result.first_violation = "seed=" + std::to_string(seed + i);
            }
        }
        ++result.samples;
    }
    return result;
}

}  // namespace auon::verify
