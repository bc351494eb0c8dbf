#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "auon/matrix.hpp"
#include "auon/transforms.hpp"

namespace auon::optim {

enum class OptimizerKind { auon, hybrid_auon, muon_ns, sgd_momentum, adamw };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::auon;
    double lr = 0.24;
    double momentum_beta = 0.95;
    bool nesterov = true;
    double weight_decay = 0.0;
    transforms::TransformKind transform = transforms::TransformKind::cosh_rms();
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;

    void validate() const {
        if (lr < 0.0) throw std::invalid_argument("OptimizerConfig: lr must be non-negative");
        if (momentum_beta < 0.0 || momentum_beta >= 1.0)
            throw std::invalid_argument("OptimizerConfig: momentum_beta must lie in [0, 1)");
        if (weight_decay < 0.0) throw std::invalid_argument("OptimizerConfig: weight_decay must be non-negative");
        if (adam_beta1 < 0.0 || adam_beta1 >= 1.0 || adam_beta2 < 0.0 || adam_beta2 >= 1.0)
            throw std::invalid_argument("OptimizerConfig: adam betas must lie in [0, 1)");
        if (adam_eps <= 0.0) throw std::invalid_argument("OptimizerConfig: adam_eps must be positive");
    }
};

/// Per-optimizer defaults. Learning rates follow the tuned values used for
/// the language-model comparison; everything is overridable.
inline OptimizerConfig default_config(OptimizerKind kind) {
    OptimizerConfig cfg;
    cfg.kind = kind;
    switch (kind) {
        case OptimizerKind::auon:
            cfg.lr = 0.24;
            cfg.transform = transforms::TransformKind::cosh_rms();
            break;
        case OptimizerKind::hybrid_auon:
            cfg.lr = 0.24;
            cfg.transform = transforms::TransformKind::hybrid_cosh_rms(1, transforms::kConservativeCoeffs);
            break;
        case OptimizerKind::muon_ns:
            cfg.lr = 0.01;
            cfg.transform = transforms::TransformKind::newton_schulz(5, transforms::kMuonCoeffs);
            break;
        case OptimizerKind::sgd_momentum:
            cfg.lr = 0.1;
            cfg.momentum_beta = 0.9;
            cfg.nesterov = false;
            cfg.transform = transforms::TransformKind::identity();
            break;
        case OptimizerKind::adamw:
            cfg.lr = 0.003;
            cfg.transform = transforms::TransformKind::identity();
            break;
    }
    return cfg;
}

inline bool is_structured(OptimizerKind kind) {
    return kind == OptimizerKind::auon || kind == OptimizerKind::hybrid_auon || kind == OptimizerKind::muon_ns;
}

struct ParamState {
    DenseMatrix value;
    DenseMatrix momentum_buffer;
    DenseMatrix adam_m;
    DenseMatrix adam_v;
    std::size_t step_count = 0;

    static ParamState create(DenseMatrix initial) {
        const std::size_t r = initial.rows();
        const std::size_t c = initial.cols();
        return ParamState{std::move(initial), DenseMatrix(r, c), DenseMatrix(r, c), DenseMatrix(r, c), 0};
    }
};

/// buf <- beta * buf + (1 - beta) * g; the effective gradient is the buffer,
/// or the lookahead blend (1 - beta) * g + beta * buf under Nesterov.
inline std::pair<DenseMatrix, DenseMatrix> momentum_blend(const DenseMatrix& buf, const DenseMatrix& g, double beta,
                                                          bool nesterov) {
    require_same_shape(buf, g, "momentum_blend");
    if (beta < 0.0 || beta >= 1.0) {
        throw std::invalid_argument("momentum_blend: beta must lie in [0, 1)");
    }
    DenseMatrix new_buf(buf.rows(), buf.cols());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        new_buf.data()[i] = beta * buf.data()[i] + (1.0 - beta) * g.data()[i];
    }
    if (!nesterov) {
        return {new_buf, new_buf};
    }
    DenseMatrix effective(buf.rows(), buf.cols());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        effective.data()[i] = (1.0 - beta) * g.data()[i] + beta * new_buf.data()[i];
    }
    return {std::move(new_buf), std::move(effective)};
}

namespace detail {

// value <- (1 - lr*wd) * value - lr_effective * update, entrywise.
inline void apply_decoupled_update(DenseMatrix& value, const DenseMatrix& update, double lr, double lr_effective,
                                   double weight_decay) {
    const double keep = 1.0 - lr * weight_decay;
    for (std::size_t i = 0; i < value.size(); ++i) {
        value.data()[i] = keep * value.data()[i] - lr_effective * update.data()[i];
    }
}

}  // namespace detail

/// A completed step plus the raw (pre-learning-rate) update that was applied,
/// for diagnostics.
struct StepOutcome {
    ParamState state;
    DenseMatrix update;
    transforms::TransformReport report;
};

/// Momentum blend followed by the configured transform; the parameter moves by
/// lr * shape_scale * U under decoupled weight decay.
inline StepOutcome step_structured_detailed(const ParamState& p, const DenseMatrix& grad,
                                            const OptimizerConfig& cfg) {
    cfg.validate();
    if (!is_structured(cfg.kind)) {
        throw std::invalid_argument("step_structured: optimizer kind is not a structured kind");
    }
    require_same_shape(p.value, grad, "step_structured");
    auto [new_buf, effective] = momentum_blend(p.momentum_buffer, grad, cfg.momentum_beta, cfg.nesterov);
    auto [update, report] = transforms::apply_transform(effective, cfg.transform);

    ParamState next = p;
    next.momentum_buffer = std::move(new_buf);
    const double lr_effective = cfg.lr * transforms::shape_scale(p.value.rows(), p.value.cols());
    detail::apply_decoupled_update(next.value, update, cfg.lr, lr_effective, cfg.weight_decay);
    next.step_count = p.step_count + 1;
    return StepOutcome{std::move(next), std::move(update), report};
}

inline ParamState step_structured(const ParamState& p, const DenseMatrix& grad, const OptimizerConfig& cfg) {
    return step_structured_detailed(p, grad, cfg).state;
}

/// Classic momentum SGD (same blend as the structured path) with decoupled
/// weight decay and no shape factor.
inline StepOutcome step_sgdm_detailed(const ParamState& p, const DenseMatrix& grad, const OptimizerConfig& cfg) {
    cfg.validate();
    require_same_shape(p.value, grad, "step_sgdm");
    auto [new_buf, effective] = momentum_blend(p.momentum_buffer, grad, cfg.momentum_beta, cfg.nesterov);

    ParamState next = p;
    next.momentum_buffer = std::move(new_buf);
    detail::apply_decoupled_update(next.value, effective, cfg.lr, cfg.lr, cfg.weight_decay);
    next.step_count = p.step_count + 1;

    transforms::TransformReport report;
    report.input_frobenius = linalg::frobenius_norm(grad);
    report.output_frobenius = linalg::frobenius_norm(effective);
    return StepOutcome{std::move(next), std::move(effective), report};
}

inline ParamState step_sgdm(const ParamState& p, const DenseMatrix& grad, const OptimizerConfig& cfg) {
    return step_sgdm_detailed(p, grad, cfg).state;
}

/// Bias-corrected first/second-moment update with decoupled weight decay.
inline StepOutcome step_adamw_detailed(const ParamState& p, const DenseMatrix& grad, const OptimizerConfig& cfg) {
    cfg.validate();
    require_same_shape(p.value, grad, "step_adamw");

    ParamState next = p;
    next.step_count = p.step_count + 1;
    const double t = static_cast<double>(next.step_count);
    const double bias1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double bias2 = 1.0 - std::pow(cfg.adam_beta2, t);

    DenseMatrix update(p.value.rows(), p.value.cols());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double gi = grad.data()[i];
        const double m = cfg.adam_beta1 * p.adam_m.data()[i] + (1.0 - cfg.adam_beta1) * gi;
        const double v = cfg.adam_beta2 * p.adam_v.data()[i] + (1.0 - cfg.adam_beta2) * gi * gi;
        next.adam_m.data()[i] = m;
        next.adam_v.data()[i] = v;
        update.data()[i] = (m / bias1) / (std::sqrt(v / bias2) + cfg.adam_eps);
    }
    detail::apply_decoupled_update(next.value, update, cfg.lr, cfg.lr, cfg.weight_decay);

    transforms::TransformReport report;
    report.input_frobenius = linalg::frobenius_norm(grad);
    report.output_frobenius = linalg::frobenius_norm(update);
    return StepOutcome{std::move(next), std::move(update), report};
}

inline ParamState step_adamw(const ParamState& p, const DenseMatrix& grad, const OptimizerConfig& cfg) {
    return step_adamw_detailed(p, grad, cfg).state;
}

/// Single entry point used by the training loop: routes on cfg.kind.
inline StepOutcome step_detailed(const ParamState& p, const DenseMatrix& grad, const OptimizerConfig& cfg) {
    if (is_structured(cfg.kind)) {
        return step_structured_detailed(p, grad, cfg);
    }
    if (cfg.kind == OptimizerKind::sgd_momentum) {
        return step_sgdm_detailed(p, grad, cfg);
    }
    return step_adamw_detailed(p, grad, cfg);
}

}  // namespace auon::optim
