#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "auon/diagnostics.hpp"
#include "auon/matrix.hpp"
#include "auon/optim.hpp"
#include "auon/random.hpp"

namespace auon::nn {

struct Dataset {
    DenseMatrix inputs;       // n x d
    std::vector<int> labels;  // n entries in [0, classes)
    std::size_t classes = 0;
};

/// Gaussian clusters around deterministic class centers. The centers depend
/// only on (classes, d); the draw is reproducible per seed. Labels cycle
/// through the classes so counts stay balanced within one.
inline Dataset make_blobs(std::uint64_t seed, std::size_t n, std::size_t classes, std::size_t d, double spread) {
    if (classes < 2 || n < classes || d < 1) {
        throw std::invalid_argument("make_blobs: need n >= classes >= 2 and d >= 1");
    }
    constexpr double kCenterRadius = 1.5;
    std::vector<std::vector<double>> centers(classes, std::vector<double>(d, 0.0));
    for (std::size_t k = 0; k < classes; ++k) {
        centers[k][k % d] += kCenterRadius;
        centers[k][(k + 1) % d] += kCenterRadius * 0.5 * static_cast<double>(k / d);
    }
    rng::Sampler sampler(seed);
    Dataset ds{DenseMatrix(n, d), std::vector<int>(n), classes};
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t label = i % classes;
        ds.labels[i] = static_cast<int>(label);
        for (std::size_t j = 0; j < d; ++j) {
            ds.inputs(i, j) = centers[label][j] + spread * sampler.gaussian();
        }
    }
    return ds;
}

/// Two-layer tanh MLP. `version` increments whenever parameters change so a
/// stale forward cache can be detected instead of silently misused.
struct MlpModel {
    DenseMatrix w1;  // hidden x d
    DenseMatrix b1;  // 1 x hidden
    DenseMatrix w2;  // classes x hidden
    DenseMatrix b2;  // 1 x classes
    std::uint64_t version = 0;

    static MlpModel init(std::uint64_t seed, std::size_t d, std::size_t hidden, std::size_t classes) {
        MlpModel m{rng::gaussian_matrix(hidden, d, seed, 1.0 / std::sqrt(static_cast<double>(d))),
                   DenseMatrix(1, hidden),
                   rng::gaussian_matrix(classes, hidden, seed ^ 0x5bd1e995ull,
                                        1.0 / std::sqrt(static_cast<double>(hidden))),
                   DenseMatrix(1, classes), 0};
        return m;
    }

    void touch() { ++version; }
};

struct ForwardCache {
    DenseMatrix inputs;  // n x d
    DenseMatrix hidden;  // n x hidden, post-tanh
    DenseMatrix probs;   // n x classes, softmax of the logits
    std::vector<int> labels;
    const MlpModel* model = nullptr;
    std::uint64_t model_version = 0;
};

/// Mean softmax cross-entropy with log-sum-exp stabilization.
inline std::pair<double, ForwardCache> forward_loss(const MlpModel& model, const Dataset& batch) {
    const std::size_t n = batch.inputs.rows();
    if (batch.labels.size() != n) {
        throw std::invalid_argument("forward_loss: labels do not match batch rows");
    }
    DenseMatrix hidden = multiply_abt(batch.inputs, model.w1);  // n x hidden
    for (std::size_t i = 0; i < n; ++i) {
        double* row = hidden.row_ptr(i);
        for (std::size_t j = 0; j < hidden.cols(); ++j) {
            row[j] = std::tanh(row[j] + model.b1(0, j));
        }
    }
    DenseMatrix logits = multiply_abt(hidden, model.w2);  // n x classes
    const std::size_t classes = logits.cols();
    DenseMatrix probs(n, classes);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double* row = logits.row_ptr(i);
        double peak = -1e300;
        for (std::size_t j = 0; j < classes; ++j) {
            row[j] += model.b2(0, j);
            peak = std::max(peak, row[j]);
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < classes; ++j) {
            sum += std::exp(row[j] - peak);
        }
        const double lse = peak + std::log(sum);
        const int label = batch.labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= classes) {
            throw std::invalid_argument("forward_loss: label out of range");
        }
        loss += lse - row[label];
        for (std::size_t j = 0; j < classes; ++j) {
            probs(i, j) = std::exp(row[j] - lse);
        }
    }
    loss /= static_cast<double>(n);
    ForwardCache cache{batch.inputs, std::move(hidden), std::move(probs), batch.labels, &model, model.version};
    return {loss, std::move(cache)};
}

struct Gradients {
    DenseMatrix w1;
    DenseMatrix b1;
    DenseMatrix w2;
    DenseMatrix b2;
};

/// Analytic gradients of the mean cross-entropy. The cache must come from a
/// forward pass of this exact model state.
inline Gradients backward(const MlpModel& model, const ForwardCache& cache) {
    if (cache.model != &model || cache.model_version != model.version) {
        throw std::logic_error("backward: stale or foreign forward cache");
    }
    const std::size_t n = cache.inputs.rows();
    const std::size_t classes = cache.probs.cols();
    const std::size_t hidden = cache.hidden.cols();

    DenseMatrix dlogits = cache.probs;
    for (std::size_t i = 0; i < n; ++i) {
        dlogits(i, static_cast<std::size_t>(cache.labels[i])) -= 1.0;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    for (double& x : dlogits.data()) {
        x *= inv_n;
    }

    Gradients g{DenseMatrix(model.w1.rows(), model.w1.cols()), DenseMatrix(1, hidden),
                DenseMatrix(model.w2.rows(), model.w2.cols()), DenseMatrix(1, classes)};

    g.w2 = multiply_atb(dlogits, cache.hidden);  // classes x hidden
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < classes; ++j) {
            g.b2(0, j) += dlogits(i, j);
        }
    }

    DenseMatrix dpre = multiply(dlogits, model.w2);  // n x hidden
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < hidden; ++j) {
            const double h = cache.hidden(i, j);
            dpre(i, j) *= 1.0 - h * h;
        }
    }
    g.w1 = multiply_atb(dpre, cache.inputs);  // hidden x d
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < hidden; ++j) {
            g.b1(0, j) += dpre(i, j);
        }
    }
    return g;
}

inline double accuracy(const MlpModel& model, const Dataset& ds) {
    const auto [loss, cache] = forward_loss(model, ds);
    (void)loss;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.inputs.rows(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < cache.probs.cols(); ++j) {
            if (cache.probs(i, j) > cache.probs(i, best)) best = j;
        }
        if (static_cast<int>(best) == ds.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(ds.inputs.rows());
}

struct EmitSet {
    bool runlog = true;
    bool diagnostics = true;
    bool spectra = false;
    bool bench = false;
};

struct RunConfig {
    std::uint64_t seed = 42;
    optim::OptimizerConfig optimizer = optim::default_config(optim::OptimizerKind::auon);
    std::size_t n = 512;
    std::size_t d = 16;
    std::size_t classes = 4;
    double spread = 1.0;
    std::size_t hidden = 32;
    std::size_t steps = 50;
    std::string output_dir;
    EmitSet emit;

    void validate() const {
        if (steps < 1) throw std::invalid_argument("RunConfig: steps must be >= 1");
        optimizer.validate();
    }
};

struct RunSummary {
    double kappa_median = 0.0;
    double kappa_p10 = 0.0;
    double sigma2_mean = 0.0;
    diagnostics::BootstrapCI kappa_ci;
    diagnostics::BootstrapCI sigma2_ci;
};

struct RunLog {
    RunConfig config;
    std::vector<diagnostics::StepDiagnostics> steps;
    RunSummary summary;
};

inline diagnostics::KappaSigma aggregate_kappa_sigma(const RunLog& log) {
    return diagnostics::aggregate_kappa_sigma(log.steps);
}

class TrainingDivergence : public std::runtime_error {
public:
    TrainingDivergence(std::size_t step, double last_finite_loss)
        : std::runtime_error("training diverged at step " + std::to_string(step) + " (last finite loss " +
                             std::to_string(last_finite_loss) + ")"),
          step_(step),
          last_finite_loss_(last_finite_loss) {}

    std::size_t step() const noexcept { return step_; }
    double last_finite_loss() const noexcept { return last_finite_loss_; }

private:
    std::size_t step_;
    double last_finite_loss_;
};

/// Full-batch training on seeded blobs, logging per-step alignment and update
/// energy for every parameter. Deterministic for a fixed config.
inline RunLog train(const RunConfig& cfg) {
    cfg.validate();
    const Dataset ds = make_blobs(cfg.seed, cfg.n, cfg.classes, cfg.d, cfg.spread);
    MlpModel model = MlpModel::init(cfg.seed * 0x9e3779b97f4a7c15ull + 1, cfg.d, cfg.hidden, cfg.classes);

    static const char* kLayerNames[4] = {"linear1.weight", "linear1.bias", "linear2.weight", "linear2.bias"};
    std::vector<optim::ParamState> params;
    params.push_back(optim::ParamState::create(model.w1));
    params.push_back(optim::ParamState::create(model.b1));
    params.push_back(optim::ParamState::create(model.w2));
    params.push_back(optim::ParamState::create(model.b2));

    RunLog log;
    log.config = cfg;
    double last_finite_loss = 0.0;
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        const auto [loss, cache] = forward_loss(model, ds);
        if (!std::isfinite(loss)) {
            throw TrainingDivergence(step, last_finite_loss);
        }
        last_finite_loss = loss;
        const Gradients grads = backward(model, cache);
        const DenseMatrix* grad_ptrs[4] = {&grads.w1, &grads.b1, &grads.w2, &grads.b2};

        diagnostics::StepDiagnostics record;
        record.step = step;
        record.loss = loss;
        for (std::size_t p = 0; p < 4; ++p) {
            optim::StepOutcome outcome = optim::step_detailed(params[p], *grad_ptrs[p], cfg.optimizer);
            const double fro = linalg::frobenius_norm(outcome.update);
            record.rho_samples.push_back({kLayerNames[p], diagnostics::alignment_sample(*grad_ptrs[p], outcome.update)});
            record.sigma2_samples.push_back({kLayerNames[p], fro * fro});
            record.update_spectral_norm.push_back(
                {kLayerNames[p], linalg::spectral_norm_estimate(outcome.update).value});
            record.rms_statistic.push_back({kLayerNames[p], outcome.report.rms_statistic});
            params[p] = std::move(outcome.state);
            if (!params[p].value.all_finite()) {
                throw TrainingDivergence(step, last_finite_loss);
            }
        }
        log.steps.push_back(std::move(record));

        model.w1 = params[0].value;
        model.b1 = params[1].value;
        model.w2 = params[2].value;
        model.b2 = params[3].value;
        model.touch();
    }

    const diagnostics::KappaSigma agg = diagnostics::aggregate_kappa_sigma(log.steps);
    log.summary.kappa_median = agg.kappa_median;
    log.summary.kappa_p10 = agg.kappa_p10;
    log.summary.sigma2_mean = agg.sigma2_mean;

    std::vector<double> rho_pool;
    std::vector<double> sigma2_pool;
    for (const auto& s : log.steps) {
        for (const auto& sample : s.rho_samples) rho_pool.push_back(sample.value);
        for (const auto& sample : s.sigma2_samples) sigma2_pool.push_back(sample.value);
    }
    log.summary.kappa_ci = diagnostics::bootstrap_ci(rho_pool, diagnostics::Statistic::median, cfg.seed ^ 0x517cc1b7ull);
    log.summary.sigma2_ci = diagnostics::bootstrap_ci(sigma2_pool, diagnostics::Statistic::mean, cfg.seed ^ 0x27220a95ull);
    return log;
}

}  // namespace auon::nn
