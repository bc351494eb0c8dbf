#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "auon/linalg.hpp"
#include "auon/matrix.hpp"

namespace auon::transforms {

inline constexpr double kFrobeniusEps = 1e-7;  // added to ||G||_F before dividing
inline constexpr double kRmsEps = 1e-8;        // added to the cosh-RMS statistic before dividing
inline constexpr double kCoshEntryLimit = 700.0;

struct NewtonSchulzCoeffs {
    double a;
    double b;
    double c;

    double sum() const noexcept { return a + b + c; }
};

/// Aggressive coefficients used by Muon-style multi-step orthogonalization.
inline constexpr NewtonSchulzCoeffs kMuonCoeffs{3.4445, -4.7750, 2.0315};
/// Conservative single-step coefficients, the hybrid default.
inline constexpr NewtonSchulzCoeffs kConservativeCoeffs{1.0, -0.5, 0.375};

/// Which update transform an optimizer step applies.
struct TransformKind {
    enum class Tag { identity, exact_polar, newton_schulz, cosh_rms, hybrid_cosh_rms };

    Tag tag = Tag::identity;
    int steps = 1;
    NewtonSchulzCoeffs coeffs = kConservativeCoeffs;

    static TransformKind identity() { return {Tag::identity, 1, kConservativeCoeffs}; }
    static TransformKind exact_polar() { return {Tag::exact_polar, 1, kConservativeCoeffs}; }
    static TransformKind newton_schulz(int steps, NewtonSchulzCoeffs coeffs = kMuonCoeffs) {
        require_steps(steps);
        return {Tag::newton_schulz, steps, coeffs};
    }
    static TransformKind cosh_rms() { return {Tag::cosh_rms, 1, kConservativeCoeffs}; }
    static TransformKind hybrid_cosh_rms(int steps = 1, NewtonSchulzCoeffs coeffs = kConservativeCoeffs) {
        require_steps(steps);
        return {Tag::hybrid_cosh_rms, steps, coeffs};
    }

private:
    static void require_steps(int steps) {
        if (steps < 1) {
            throw std::invalid_argument("TransformKind: steps must be >= 1");
        }
    }
};

/// Cheap per-call statistics. `output_spectral_norm` is not computed by the
/// transforms themselves (that would turn a linear-time pass into an iterative
/// one); callers that report it fill the field via linalg::spectral_norm.
struct TransformReport {
    double input_frobenius = 0.0;
    double rms_statistic = 0.0;  // cosh-RMS r; 0 when the cosh path did not run
    double output_spectral_norm = 0.0;
    double output_frobenius = 0.0;
};

/// g / (||g||_F + eps0). Zero input maps to zero.
inline DenseMatrix normalize_frobenius(const DenseMatrix& g, double eps0 = kFrobeniusEps) {
    const double denom = linalg::frobenius_norm(g) + eps0;
    return scaled(g, 1.0 / denom);
}

/// sqrt(mean(cosh^2(x_ij))). Entries above 700 in magnitude signal that the
/// caller skipped Frobenius normalization and are rejected. Entries in
/// (350, 700] take a rescaled path because cosh^2 itself would overflow.
inline double cosh_rms(const DenseMatrix& x) {
    const double peak = max_abs(x);
    if (peak > kCoshEntryLimit) {
        throw std::domain_error("cosh_rms: entry magnitude exceeds 700 (input not normalized?)");
    }
    const double n = static_cast<double>(x.size());
    if (peak <= 350.0) {
        double acc = 0.0;
        for (double v : x.data()) {
            const double c = std::cosh(v);
            acc += c * c;
        }
        return std::sqrt(acc / n);
    }
    // factor out e^peak: cosh(v) = e^peak * (e^(v-peak) + e^(-v-peak)) / 2
    double acc = 0.0;
    for (double v : x.data()) {
        const double h = 0.5 * (std::exp(v - peak) + std::exp(-v - peak));
        acc += h * h;
    }
    return std::exp(peak) * std::sqrt(acc / n);
}

/// The raw scaling stage: U = x / (cosh_rms(x) + eps). Returns U and the
/// statistic r. Does not normalize first.
inline std::pair<DenseMatrix, double> cosh_rms_scale(const DenseMatrix& x, double eps = kRmsEps) {
    const double r = cosh_rms(x);
    return {scaled(x, 1.0 / (r + eps)), r};
}

/// Full transform: Frobenius-normalize, measure the cosh-RMS statistic, and
/// shrink the whole step by it. Direction and entry ratios are preserved;
/// the output spectral norm is strictly below 1 for any nonzero input.
inline std::pair<DenseMatrix, TransformReport> auon_transform(const DenseMatrix& g, double eps0 = kFrobeniusEps,
                                                              double eps = kRmsEps) {
    TransformReport report;
    report.input_frobenius = linalg::frobenius_norm(g);
    DenseMatrix update = normalize_frobenius(g, eps0);
    auto [u, r] = cosh_rms_scale(update, eps);
    report.rms_statistic = r;
    report.output_frobenius = linalg::frobenius_norm(u);
    return {std::move(u), report};
}

/// The quintic map X <- a X + (b A + c A^2) X with A = X X^T, applied
/// `steps` times to X as given (no normalization, no transpose handling).
inline DenseMatrix newton_schulz_iterate(DenseMatrix x, int steps, NewtonSchulzCoeffs coeffs) {
    if (steps < 0) {
        throw std::invalid_argument("newton_schulz_iterate: steps must be >= 0");
    }
    for (int s = 0; s < steps; ++s) {
        const DenseMatrix a = multiply_abt(x, x);
        const DenseMatrix a2 = multiply(a, a);
        const DenseMatrix b = add_scaled(scaled(a, coeffs.b), a2, coeffs.c);
        x = add_scaled(scaled(x, coeffs.a), multiply(b, x), 1.0);
    }
    return x;
}

/// Newton-Schulz orthogonalization: Frobenius-normalize, run the quintic map
/// on the wide orientation (tall inputs are transposed in and back out).
inline DenseMatrix newton_schulz(const DenseMatrix& g, int steps, NewtonSchulzCoeffs coeffs = kMuonCoeffs) {
    if (g.is_zero()) {
        throw std::invalid_argument("newton_schulz: zero matrix");
    }
    if (steps < 1) {
        throw std::invalid_argument("newton_schulz: steps must be >= 1");
    }
    DenseMatrix x = normalize_frobenius(g);
    const bool tall = g.rows() > g.cols();
    if (tall) {
        x = transpose(x);
    }
    x = newton_schulz_iterate(std::move(x), steps, coeffs);
    if (tall) {
        x = transpose(x);
    }
    return x;
}

/// One (or more) Newton-Schulz steps to partially decorrelate directions,
/// then the cosh-RMS pipeline to enforce the spectral contraction.
/// steps == 0 degenerates to auon_transform.
inline std::pair<DenseMatrix, TransformReport> hybrid_transform(const DenseMatrix& g, int steps = 1,
                                                                NewtonSchulzCoeffs coeffs = kConservativeCoeffs) {
    if (g.is_zero()) {
        throw std::invalid_argument("hybrid_transform: zero matrix");
    }
    if (steps < 0) {
        throw std::invalid_argument("hybrid_transform: steps must be >= 0");
    }
    if (steps == 0) {
        return auon_transform(g);
    }
    const double input_frobenius = linalg::frobenius_norm(g);
    const DenseMatrix x = newton_schulz(g, steps, coeffs);
    auto [u, report] = auon_transform(x);
    report.input_frobenius = input_frobenius;
    return {std::move(u), report};
}

/// Exact polar-factor baseline.
inline DenseMatrix exact_orthogonalize(const DenseMatrix& g) { return linalg::polar_factor(g); }

/// sqrt(max(1, rows/cols)): matches update RMS across parameter shapes.
inline double shape_scale(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("shape_scale: dimensions must be positive");
    }
    const double ratio = static_cast<double>(rows) / static_cast<double>(cols);
    return std::sqrt(std::max(1.0, ratio));
}

/// Dispatch on TransformKind. Identity and cosh_rms accept zero input; the
/// orthogonalizing kinds reject it.
inline std::pair<DenseMatrix, TransformReport> apply_transform(const DenseMatrix& g, const TransformKind& kind) {
    switch (kind.tag) {
        case TransformKind::Tag::identity: {
            TransformReport report;
            report.input_frobenius = linalg::frobenius_norm(g);
            report.output_frobenius = report.input_frobenius;
            return {g, report};
        }
        case TransformKind::Tag::exact_polar: {
            TransformReport report;
            report.input_frobenius = linalg::frobenius_norm(g);
            DenseMatrix u = exact_orthogonalize(g);
            report.output_frobenius = linalg::frobenius_norm(u);
            return {std::move(u), report};
        }
        case TransformKind::Tag::newton_schulz: {
            TransformReport report;
            report.input_frobenius = linalg::frobenius_norm(g);
            DenseMatrix u = newton_schulz(g, kind.steps, kind.coeffs);
            report.output_frobenius = linalg::frobenius_norm(u);
            return {std::move(u), report};
        }
        case TransformKind::Tag::cosh_rms:
            return auon_transform(g);
        case TransformKind::Tag::hybrid_cosh_rms:
            return hybrid_transform(g, kind.steps, kind.coeffs);
    }
    throw std::logic_error("apply_transform: unknown kind");
}

}  // namespace auon::transforms
