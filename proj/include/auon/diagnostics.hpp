#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "auon/linalg.hpp"
#include "auon/matrix.hpp"
#include "auon/random.hpp"
#include "auon/transforms.hpp"

namespace auon::diagnostics {

inline constexpr double kAlignmentEps = 1e-12;

struct LayerSample {
    std::string layer;
    double value = 0.0;
};

/// One training step worth of measurements, one sample per trainable parameter.
struct StepDiagnostics {
    std::size_t step = 0;
    double loss = 0.0;
    std::vector<LayerSample> rho_samples;            // <g, U> / (||g||_F^2 + eps)
    std::vector<LayerSample> sigma2_samples;         // ||U||_F^2
    std::vector<LayerSample> update_spectral_norm;   // sigma_1(U)
    std::vector<LayerSample> rms_statistic;          // cosh-RMS r (0 if the path did not run)
};

/// <g, u> / (||g||_F^2 + eps) over flattened entries.
inline double alignment_sample(const DenseMatrix& g, const DenseMatrix& u, double eps = kAlignmentEps) {
    require_same_shape(g, u, "alignment_sample");
    const double fro = linalg::frobenius_norm(g);
    return dot(g, u) / (fro * fro + eps);
}

/// Quantile with linear interpolation between order statistics, q in [0, 1].
inline double quantile(std::vector<double> samples, double q) {
    if (samples.empty()) {
        throw std::invalid_argument("quantile: no samples");
    }
    if (q < 0.0 || q > 1.0) {
        throw std::invalid_argument("quantile: q out of [0, 1]");
    }
    std::sort(samples.begin(), samples.end());
    const double rank = q * static_cast<double>(samples.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= samples.size()) {
        return samples.back();
    }
    return samples[lo] + frac * (samples[lo + 1] - samples[lo]);
}

struct KappaSigma {
    double kappa_median = 0.0;
    double kappa_p10 = 0.0;
    double sigma2_mean = 0.0;
};

/// Median and 10th percentile of all rho samples, mean of all sigma^2 samples,
/// pooled across steps and layers.
inline KappaSigma aggregate_kappa_sigma(const std::vector<StepDiagnostics>& steps) {
    std::vector<double> rho;
    double sigma2_sum = 0.0;
    std::size_t sigma2_count = 0;
    for (const StepDiagnostics& s : steps) {
        for (const LayerSample& sample : s.rho_samples) {
            rho.push_back(sample.value);
        }
        for (const LayerSample& sample : s.sigma2_samples) {
            sigma2_sum += sample.value;
            ++sigma2_count;
        }
    }
    if (rho.empty() || sigma2_count == 0) {
        throw std::invalid_argument("aggregate_kappa_sigma: empty log");
    }
    KappaSigma out;
    out.kappa_median = quantile(rho, 0.5);
    out.kappa_p10 = quantile(rho, 0.1);
    out.sigma2_mean = sigma2_sum / static_cast<double>(sigma2_count);
    return out;
}

enum class Statistic { median, mean };

struct BootstrapCI {
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.95;
    int iterations = 2000;
};

/// Percentile bootstrap. Deterministic for a fixed seed; the interval is
/// widened to contain the plug-in statistic in degenerate cases.
inline BootstrapCI bootstrap_ci(const std::vector<double>& samples, Statistic statistic, std::uint64_t seed,
                                int iterations = 2000, double level = 0.95) {
    if (samples.size() < 2) {
        throw std::invalid_argument("bootstrap_ci: need at least 2 samples");
    }
    if (iterations < 1 || level <= 0.0 || level >= 1.0) {
        throw std::invalid_argument("bootstrap_ci: bad iterations or level");
    }
    const auto evaluate = [statistic](std::vector<double>& xs) {
        if (statistic == Statistic::median) {
            return quantile(xs, 0.5);
        }
        double sum = 0.0;
        for (double x : xs) sum += x;
        return sum / static_cast<double>(xs.size());
    };

    std::vector<double> plug_in = samples;
    BootstrapCI ci;
    ci.iterations = iterations;
    ci.level = level;
    ci.point = evaluate(plug_in);

    rng::Sampler sampler(seed);
    std::vector<double> stats(static_cast<std::size_t>(iterations));
    std::vector<double> resample(samples.size());
    for (int it = 0; it < iterations; ++it) {
        for (double& x : resample) {
            x = samples[sampler.index(samples.size())];
        }
        stats[static_cast<std::size_t>(it)] = evaluate(resample);
    }
    const double tail = (1.0 - level) / 2.0;
    ci.lo = std::min(quantile(stats, tail), ci.point);
    ci.hi = std::max(quantile(stats, 1.0 - tail), ci.point);
    return ci;
}

struct CorrelationEnergy {
    double trace = 0.0;
    double isotropy_residual = 0.0;  // ||M - (trace(M)/n) I||_F for M = U^T U
};

inline CorrelationEnergy correlation_energy(const DenseMatrix& u) {
    const DenseMatrix m = multiply_atb(u, u);
    const std::size_t n = m.rows();
    CorrelationEnergy out;
    for (std::size_t i = 0; i < n; ++i) {
        out.trace += m(i, i);
    }
    const double mean_diag = out.trace / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = m(i, j) - (i == j ? mean_diag : 0.0);
            acc += d * d;
        }
    }
    out.isotropy_residual = std::sqrt(acc);
    return out;
}

struct SpectrumTrajectory {
    std::vector<std::vector<double>> spectra;         // entry 0 = normalized input
    std::vector<double> gram_identity_distance;       // ||W W^T - I||_F on the wide orientation
};

/// Full singular spectrum and Gram identity distance after each Newton-Schulz
/// step; step 0 is the Frobenius-normalized input.
inline SpectrumTrajectory singular_trajectory(const DenseMatrix& g, int steps,
                                              transforms::NewtonSchulzCoeffs coeffs) {
    if (g.is_zero()) {
        throw std::invalid_argument("singular_trajectory: zero matrix");
    }
    if (steps < 0) {
        throw std::invalid_argument("singular_trajectory: steps must be >= 0");
    }
    DenseMatrix x = transforms::normalize_frobenius(g);
    if (g.rows() > g.cols()) {
        x = transpose(x);  // wide orientation, as the iteration runs it
    }
    SpectrumTrajectory out;
    const std::size_t k = x.rows();
    for (int s = 0; s <= steps; ++s) {
        out.spectra.push_back(linalg::singular_values(x));
        const DenseMatrix gram = multiply_abt(x, x);
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                const double d = gram(i, j) - (i == j ? 1.0 : 0.0);
                acc += d * d;
            }
        }
        out.gram_identity_distance.push_back(std::sqrt(acc));
        if (s < steps) {
            x = transforms::newton_schulz_iterate(std::move(x), 1, coeffs);
        }
    }
    return out;
}

enum class BenchTransform { auon, hybrid1, newton_schulz5, polar };

inline const char* bench_transform_name(BenchTransform t) {
    switch (t) {
        case BenchTransform::auon: return "auon";
        case BenchTransform::hybrid1: return "hybrid1";
        case BenchTransform::newton_schulz5: return "newton_schulz5";
        case BenchTransform::polar: return "polar";
    }
    return "?";
}

struct BenchRow {
    std::size_t size = 0;
    std::string transform;
    double mean_seconds = 0.0;
    double std_seconds = 0.0;
};

inline const std::vector<BenchTransform>& all_bench_transforms() {
    static const std::vector<BenchTransform> kinds{BenchTransform::auon, BenchTransform::hybrid1,
                                                   BenchTransform::newton_schulz5, BenchTransform::polar};
    return kinds;
}

/// Wall-times each transform on seeded n x n Gaussians, one warm-up run
/// excluded from the statistics. Timing sections are single-threaded.
inline std::vector<BenchRow> transform_bench(const std::vector<std::size_t>& sizes, int repeats,
                                             const std::vector<BenchTransform>& kinds = all_bench_transforms()) {
    if (repeats < 1) {
        throw std::invalid_argument("transform_bench: repeats must be >= 1");
    }
    for (std::size_t n : sizes) {
        if (n < 16) {
            throw std::invalid_argument("transform_bench: sizes must be >= 16");
        }
    }
    const auto run_one = [](BenchTransform kind, const DenseMatrix& g) {
        switch (kind) {
            case BenchTransform::auon: (void)transforms::auon_transform(g); break;
            case BenchTransform::hybrid1: (void)transforms::hybrid_transform(g, 1); break;
            case BenchTransform::newton_schulz5: (void)transforms::newton_schulz(g, 5, transforms::kMuonCoeffs); break;
            case BenchTransform::polar: (void)transforms::exact_orthogonalize(g); break;
        }
    };

    std::vector<BenchRow> rows;
    for (std::size_t n : sizes) {
        const DenseMatrix g = rng::gaussian_matrix(n, n, 0xB45Eull + n);
        for (BenchTransform kind : kinds) {
            run_one(kind, g);  // warm-up
            std::vector<double> seconds;
            seconds.reserve(static_cast<std::size_t>(repeats));
            for (int rep = 0; rep < repeats; ++rep) {
                const auto t0 = std::chrono::steady_clock::now();
                run_one(kind, g);
                const auto t1 = std::chrono::steady_clock::now();
                seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
            }
            double mean = 0.0;
            for (double s : seconds) mean += s;
            mean /= static_cast<double>(seconds.size());
            double var = 0.0;
            for (double s : seconds) var += (s - mean) * (s - mean);
            const double stddev = seconds.size() > 1
                                      ? std::sqrt(var / static_cast<double>(seconds.size() - 1))
                                      : 0.0;
            rows.push_back(BenchRow{n, bench_transform_name(kind), mean, stddev});
        }
    }
    return rows;
}

}  // namespace auon::diagnostics
