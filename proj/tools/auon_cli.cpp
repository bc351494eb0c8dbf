// Command-line front end: transform demos, property verification batteries,
// benchmarks, Newton-Schulz spectrum traces, and training runs.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "auon/diagnostics.hpp"
#include "auon/linalg.hpp"
#include "auon/matrix.hpp"
#include "auon/nn.hpp"
#include "auon/optim.hpp"
#include "auon/random.hpp"
#include "auon/transforms.hpp"
#include "auon/verify.hpp"

namespace {

using auon::DenseMatrix;
namespace diag = auon::diagnostics;
namespace linalg = auon::linalg;
namespace nn = auon::nn;
namespace optim = auon::optim;
namespace transforms = auon::transforms;
namespace verify = auon::verify;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::filesystem::path resolve_output_dir(const std::string& flag_value) {
    if (!flag_value.empty()) {
        return flag_value;
    }
    if (const char* env = std::getenv("AUON_OUTPUT_DIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return ".";
}

std::filesystem::path prepare_output_dir(const std::string& flag_value) {
    const std::filesystem::path dir = resolve_output_dir(flag_value);
    std::filesystem::create_directories(dir);
    return dir;
}

std::pair<std::size_t, std::size_t> parse_shape(const std::string& text) {
    const auto sep = text.find('x');
    if (sep == std::string::npos) {
        throw CLI::ValidationError("--shape", "expected ROWSxCOLS, e.g. 64x64");
    }
    const long rows = std::stol(text.substr(0, sep));
    const long cols = std::stol(text.substr(sep + 1));
    if (rows < 1 || cols < 1) {
        throw CLI::ValidationError("--shape", "dimensions must be positive");
    }
    return {static_cast<std::size_t>(rows), static_cast<std::size_t>(cols)};
}

std::vector<double> parse_doubles(const std::string& text, char sep) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find(sep, pos);
        const std::string token = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (!token.empty()) {
            out.push_back(std::stod(token));
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

DenseMatrix parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find(';', pos);
        const std::string row = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (!row.empty()) {
            rows.push_back(parse_doubles(row, ','));
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (rows.empty()) {
        throw CLI::ValidationError("--matrix", "no rows parsed");
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> data;
    for (const auto& row : rows) {
        if (row.size() != cols) {
            throw CLI::ValidationError("--matrix", "ragged rows");
        }
        data.insert(data.end(), row.begin(), row.end());
    }
    return DenseMatrix(rows.size(), cols, std::move(data));
}

void write_matrix_csv(const DenseMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out << (j ? "," : "") << fmt(m(i, j));
        }
        out << "\n";
    }
}

transforms::NewtonSchulzCoeffs parse_coeffs(const std::string& text, transforms::NewtonSchulzCoeffs fallback) {
    if (text.empty()) {
        return fallback;
    }
    const std::vector<double> values = parse_doubles(text, ',');
    if (values.size() != 3) {
        throw CLI::ValidationError("--coeffs", "expected a,b,c");
    }
    return {values[0], values[1], values[2]};
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

struct TransformArgs {
    std::string kind = "cosh-rms";
    std::string matrix;
    std::string shape;
    std::uint64_t seed = 1;
    int steps = -1;  // -1: per-kind default
    std::string coeffs;
    std::string out;
    std::string out_dir;
};

int run_transform(const TransformArgs& args) {
    DenseMatrix input = [&]() {
        if (!args.matrix.empty()) {
            DenseMatrix m = parse_matrix(args.matrix);
            if (!args.shape.empty()) {
                const auto [rows, cols] = parse_shape(args.shape);
                if (rows != m.rows() || cols != m.cols()) {
                    throw CLI::ValidationError("--shape", "does not match --matrix dimensions");
                }
            }
            return m;
        }
        if (args.shape.empty()) {
            throw CLI::ValidationError("--shape", "need --matrix or --shape with --seed");
        }
        const auto [rows, cols] = parse_shape(args.shape);
        return auon::rng::gaussian_matrix(rows, cols, args.seed);
    }();

    transforms::TransformKind kind = [&]() {
        if (args.kind == "identity") return transforms::TransformKind::identity();
        if (args.kind == "polar") return transforms::TransformKind::exact_polar();
        if (args.kind == "newton-schulz") {
            return transforms::TransformKind::newton_schulz(args.steps > 0 ? args.steps : 5,
                                                            parse_coeffs(args.coeffs, transforms::kMuonCoeffs));
        }
        if (args.kind == "cosh-rms") return transforms::TransformKind::cosh_rms();
        if (args.kind == "hybrid") {
            return transforms::TransformKind::hybrid_cosh_rms(args.steps > 0 ? args.steps : 1,
                                                              parse_coeffs(args.coeffs, transforms::kConservativeCoeffs));
        }
        throw CLI::ValidationError("--kind", "unknown transform kind '" + args.kind + "'");
    }();

    auto [output, report] = transforms::apply_transform(input, kind);
    report.output_spectral_norm = output.is_zero() ? 0.0 : linalg::spectral_norm_estimate(output).value;

    std::cout << "kind: " << args.kind << "\n"
              << "shape: " << input.rows() << "x" << input.cols() << "\n"
              << "input_frobenius: " << fmt(report.input_frobenius) << "\n"
              << "rms_statistic: " << fmt(report.rms_statistic) << "\n"
              << "output_spectral_norm: " << fmt(report.output_spectral_norm) << "\n"
              << "output_frobenius: " << fmt(report.output_frobenius) << "\n";

    const std::filesystem::path path =
        args.out.empty() ? prepare_output_dir(args.out_dir) / "transform_out.csv" : std::filesystem::path(args.out);
    write_matrix_csv(output, path);
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::uint64_t seed = 1;
    std::size_t battery = 1020;
    std::vector<double> spikes;
};

int run_verify(const VerifyArgs& args) {
    bool all_pass = true;
    const auto report_margin = [&all_pass](const char* name, const verify::MarginResult& r, const char* what) {
        all_pass = all_pass && r.pass();
        std::printf("%-20s %s  samples=%zu  worst %s=%.6e  threshold=%.1e%s%s\n", name,
                    r.pass() ? "PASS" : "FAIL", r.samples, what, r.worst, r.threshold,
                    r.pass() ? "" : "  counterexample: ", r.pass() ? "" : r.first_violation.c_str());
    };

    if (args.spikes.empty()) {
        const verify::TrustRegionResult tr = verify::run_trust_region_battery(args.seed, args.battery);
        all_pass = all_pass && tr.violations == 0;
        std::printf("%-20s %s  samples=%zu  worst |U|_2=%.9f  min slack=%.3e%s%s\n", "trust-region",
                    tr.violations == 0 ? "PASS" : "FAIL", tr.samples, tr.worst_spectral_norm, tr.worst_slack,
                    tr.violations == 0 ? "" : "  counterexample: ", tr.violations == 0 ? "" : tr.first_violation.c_str());
    }

    const std::vector<double> spikes = args.spikes.empty() ? std::vector<double>{2.0, 5.0, 10.0} : args.spikes;
    const verify::TailResult tail = verify::run_tail_battery(spikes);
    all_pass = all_pass && tail.pass();
    std::printf("%-20s %s\n", "tail-suppression", tail.pass() ? "PASS" : "FAIL");
    for (const verify::TailCase& c : tail.cases) {
        std::printf("  a=%-4g %4zux%-4zu %-8s |U|_2=%.6e  sqrtN/cosh=%.6e%s  N/cosh=%.6e%s  radius=%.6e%s\n", c.a,
                    c.rows, c.cols, c.diagonal ? "diagonal" : "single", c.spectral_norm, c.sqrt_n_bound,
                    c.sqrt_n_holds ? " ok" : " --", c.paper_bound, c.paper_holds ? " ok" : " VIOLATED", c.radius,
                    c.radius_holds ? " ok" : " VIOLATED");
    }

    if (args.spikes.empty()) {
        report_margin("correlation-energy", verify::run_correlation_identity_battery(args.seed), "rel err");
        report_margin("scale-invariance", verify::run_scale_invariance_battery(args.seed), "entry gap");
        report_margin("variance-bound", verify::run_variance_bound_battery(args.seed), "|U|_F^2");
        report_margin("direction", verify::run_direction_preservation_battery(args.seed), "ratio dev");
    }

    std::printf("verify: %s\n", all_pass ? "ALL PASS" : "FAILURES PRESENT");
    return all_pass ? 0 : 2;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string sizes = "64,128,256";
    int repeats = 3;
    bool skip_polar = false;
    std::string out;
    std::string out_dir;
};

int run_bench(const BenchArgs& args) {
    std::vector<std::size_t> sizes;
    for (double v : parse_doubles(args.sizes, ',')) {
        if (v < 1.0) {
            throw CLI::ValidationError("--sizes", "sizes must be positive");
        }
        sizes.push_back(static_cast<std::size_t>(v));
    }
    if (sizes.empty()) {
        throw CLI::ValidationError("--sizes", "no sizes given");
    }
    std::vector<diag::BenchTransform> kinds{diag::BenchTransform::auon, diag::BenchTransform::hybrid1,
                                            diag::BenchTransform::newton_schulz5};
    if (!args.skip_polar) {
        kinds.push_back(diag::BenchTransform::polar);
    }
    const std::vector<diag::BenchRow> rows = diag::transform_bench(sizes, args.repeats, kinds);

    const std::filesystem::path path =
        args.out.empty() ? prepare_output_dir(args.out_dir) / "bench.csv" : std::filesystem::path(args.out);
    std::ofstream csv(path);
    if (!csv) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    csv << "size,transform,mean_seconds,std_seconds\n";
    for (const auto& row : rows) {
        csv << row.size << "," << row.transform << "," << fmt(row.mean_seconds) << "," << fmt(row.std_seconds) << "\n";
        std::printf("%6zu  %-16s mean=%.6es  std=%.2es\n", row.size, row.transform.c_str(), row.mean_seconds,
                    row.std_seconds);
    }
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// spectra
// ---------------------------------------------------------------------------

struct SpectraArgs {
    std::string shape = "64x64";
    std::uint64_t seed = 12;
    int steps = 5;
    std::string coeffs;
    std::string out_dir;
};

int run_spectra(const SpectraArgs& args) {
    const auto [rows, cols] = parse_shape(args.shape);
    const DenseMatrix g = auon::rng::gaussian_matrix(rows, cols, args.seed);
    const transforms::NewtonSchulzCoeffs coeffs = parse_coeffs(args.coeffs, transforms::kMuonCoeffs);
    const diag::SpectrumTrajectory traj = diag::singular_trajectory(g, args.steps, coeffs);

    const std::filesystem::path dir = prepare_output_dir(args.out_dir);
    {
        std::ofstream csv(dir / "spectra.csv");
        csv << "step,index,sigma\n";
        for (std::size_t step = 0; step < traj.spectra.size(); ++step) {
            for (std::size_t index = 0; index < traj.spectra[step].size(); ++index) {
                csv << step << "," << index << "," << fmt(traj.spectra[step][index]) << "\n";
            }
        }
    }
    {
        std::ofstream csv(dir / "gram.csv");
        csv << "step,frobenius_distance_to_identity\n";
        for (std::size_t step = 0; step < traj.gram_identity_distance.size(); ++step) {
            csv << step << "," << fmt(traj.gram_identity_distance[step]) << "\n";
        }
    }
    for (std::size_t step = 0; step < traj.gram_identity_distance.size(); ++step) {
        std::printf("step %zu: |WW^T - I|_F = %.6f\n", step, traj.gram_identity_distance[step]);
    }
    std::cout << "wrote " << (dir / "spectra.csv").string() << " and " << (dir / "gram.csv").string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string config;
    std::string optimizer = "auon";
    std::optional<double> lr;
    std::optional<double> momentum;
    std::optional<bool> nesterov;
    std::optional<double> weight_decay;
    std::optional<int> ns_steps;
    std::uint64_t seed = 42;
    std::size_t steps = 50;
    std::size_t n = 512;
    std::size_t dim = 16;
    std::size_t classes = 4;
    double spread = 1.0;
    std::size_t hidden = 32;
    std::string out_dir;
    bool no_runlog = false;
    bool no_diagnostics = false;
};

// Plain key=value lines; '#' starts a comment. Values only fill in options the
// command line did not set.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read config file " + path);
    }
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) {
            kv[key] = value;
        }
    }
    return kv;
}

void merge_config_file(TrainArgs& args, const CLI::App& cmd) {
    if (args.config.empty()) {
        return;
    }
    const std::map<std::string, std::string> kv = parse_config_file(args.config);
    const auto unset = [&cmd](const char* flag) { return cmd.count(flag) == 0; };
    const auto get = [&kv](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (const auto* v = get("optimizer"); v && unset("--optimizer")) args.optimizer = *v;
    if (const auto* v = get("lr"); v && unset("--lr")) args.lr = std::stod(*v);
    if (const auto* v = get("momentum"); v && unset("--momentum")) args.momentum = std::stod(*v);
    if (const auto* v = get("nesterov"); v && unset("--nesterov")) args.nesterov = std::stoi(*v) != 0;
    if (const auto* v = get("weight_decay"); v && unset("--weight-decay")) args.weight_decay = std::stod(*v);
    if (const auto* v = get("ns_steps"); v && unset("--ns-steps")) args.ns_steps = std::stoi(*v);
    if (const auto* v = get("seed"); v && unset("--seed")) args.seed = std::stoull(*v);
    if (const auto* v = get("steps"); v && unset("--steps")) args.steps = std::stoul(*v);
    if (const auto* v = get("n"); v && unset("--n")) args.n = std::stoul(*v);
    if (const auto* v = get("dim"); v && unset("--dim")) args.dim = std::stoul(*v);
    if (const auto* v = get("classes"); v && unset("--classes")) args.classes = std::stoul(*v);
    if (const auto* v = get("spread"); v && unset("--spread")) args.spread = std::stod(*v);
    if (const auto* v = get("hidden"); v && unset("--hidden")) args.hidden = std::stoul(*v);
    if (const auto* v = get("out_dir"); v && unset("--out-dir")) args.out_dir = *v;
}

optim::OptimizerKind parse_optimizer(const std::string& name) {
    if (name == "auon") return optim::OptimizerKind::auon;
    if (name == "hybrid") return optim::OptimizerKind::hybrid_auon;
    if (name == "muon") return optim::OptimizerKind::muon_ns;
    if (name == "sgdm") return optim::OptimizerKind::sgd_momentum;
    if (name == "adamw") return optim::OptimizerKind::adamw;
    throw CLI::ValidationError("--optimizer", "unknown optimizer '" + name + "'");
}

nlohmann::json config_to_json(const nn::RunConfig& cfg, const std::string& optimizer_name) {
    nlohmann::json j;
    j["seed"] = cfg.seed;
    j["optimizer"] = {{"kind", optimizer_name},
                      {"lr", cfg.optimizer.lr},
                      {"momentum_beta", cfg.optimizer.momentum_beta},
                      {"nesterov", cfg.optimizer.nesterov},
                      {"weight_decay", cfg.optimizer.weight_decay},
                      {"adam_beta1", cfg.optimizer.adam_beta1},
                      {"adam_beta2", cfg.optimizer.adam_beta2},
                      {"adam_eps", cfg.optimizer.adam_eps},
                      {"transform_steps", cfg.optimizer.transform.steps}};
    j["dataset"] = {{"n", cfg.n}, {"d", cfg.d}, {"classes", cfg.classes}, {"spread", cfg.spread}};
    j["hidden"] = cfg.hidden;
    j["steps"] = cfg.steps;
    j["output_dir"] = cfg.output_dir;
    j["emit"] = {{"runlog", cfg.emit.runlog},
                 {"diagnostics", cfg.emit.diagnostics},
                 {"spectra", cfg.emit.spectra},
                 {"bench", cfg.emit.bench}};
    return j;
}

nlohmann::json samples_to_json(const std::vector<diag::LayerSample>& samples) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& s : samples) {
        j[s.layer] = s.value;
    }
    return j;
}

int run_train(const TrainArgs& args) {
    nn::RunConfig cfg;
    cfg.seed = args.seed;
    cfg.optimizer = optim::default_config(parse_optimizer(args.optimizer));
    if (args.lr) cfg.optimizer.lr = *args.lr;
    if (args.momentum) cfg.optimizer.momentum_beta = *args.momentum;
    if (args.nesterov) cfg.optimizer.nesterov = *args.nesterov;
    if (args.weight_decay) cfg.optimizer.weight_decay = *args.weight_decay;
    if (args.ns_steps) {
        if (cfg.optimizer.transform.tag == transforms::TransformKind::Tag::newton_schulz) {
            cfg.optimizer.transform = transforms::TransformKind::newton_schulz(*args.ns_steps);
        } else if (cfg.optimizer.transform.tag == transforms::TransformKind::Tag::hybrid_cosh_rms) {
            cfg.optimizer.transform = transforms::TransformKind::hybrid_cosh_rms(*args.ns_steps);
        }
    }
    cfg.n = args.n;
    cfg.d = args.dim;
    cfg.classes = args.classes;
    cfg.spread = args.spread;
    cfg.hidden = args.hidden;
    cfg.steps = args.steps;
    cfg.emit.runlog = !args.no_runlog;
    cfg.emit.diagnostics = !args.no_diagnostics;
    const std::filesystem::path dir = prepare_output_dir(args.out_dir);
    cfg.output_dir = dir.string();

    nn::RunLog log;
    try {
        log = nn::train(cfg);
    } catch (const nn::TrainingDivergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    if (cfg.emit.diagnostics) {
        std::ofstream csv(dir / "diagnostics.csv");
        csv << "step,loss,kappa_median_sofar,sigma2_mean_sofar\n";
        std::vector<double> rho_pool;
        double sigma2_sum = 0.0;
        std::size_t sigma2_count = 0;
        for (const auto& step : log.steps) {
            for (const auto& s : step.rho_samples) rho_pool.push_back(s.value);
            for (const auto& s : step.sigma2_samples) {
                sigma2_sum += s.value;
                ++sigma2_count;
            }
            csv << step.step << "," << fmt(step.loss) << "," << fmt(diag::quantile(rho_pool, 0.5)) << ","
                << fmt(sigma2_sum / static_cast<double>(sigma2_count)) << "\n";
        }
    }

    if (cfg.emit.runlog) {
        nlohmann::json j;
        j["config"] = config_to_json(cfg, args.optimizer);
        j["steps"] = nlohmann::json::array();
        for (const auto& step : log.steps) {
            j["steps"].push_back({{"step", step.step},
                                  {"loss", step.loss},
                                  {"rho", samples_to_json(step.rho_samples)},
                                  {"sigma2", samples_to_json(step.sigma2_samples)},
                                  {"update_spectral_norm", samples_to_json(step.update_spectral_norm)},
                                  {"rms", samples_to_json(step.rms_statistic)}});
        }
        j["summary"] = {{"kappa_median", log.summary.kappa_median},
                        {"kappa_p10", log.summary.kappa_p10},
                        {"sigma2_mean", log.summary.sigma2_mean},
                        {"kappa_ci", {{"lo", log.summary.kappa_ci.lo},
                                      {"hi", log.summary.kappa_ci.hi},
                                      {"level", log.summary.kappa_ci.level},
                                      {"iterations", log.summary.kappa_ci.iterations}}},
                        {"sigma2_ci", {{"lo", log.summary.sigma2_ci.lo},
                                       {"hi", log.summary.sigma2_ci.hi},
                                       {"level", log.summary.sigma2_ci.level},
                                       {"iterations", log.summary.sigma2_ci.iterations}}}};
        std::ofstream out(dir / "runlog.json");
        out << j.dump(2) << "\n";
    }

    std::printf("steps: %zu   initial loss: %s   final loss: %s\n", log.steps.size(), fmt(log.steps.front().loss).c_str(),
                fmt(log.steps.back().loss).c_str());
    std::printf("kappa_median: %s\n", fmt(log.summary.kappa_median).c_str());
    std::printf("kappa_p10: %s\n", fmt(log.summary.kappa_p10).c_str());
    std::printf("sigma2_mean: %s\n", fmt(log.summary.sigma2_mean).c_str());
    std::printf("kappa 95%% CI: [%s, %s] (%d resamples)\n", fmt(log.summary.kappa_ci.lo).c_str(),
                fmt(log.summary.kappa_ci.hi).c_str(), log.summary.kappa_ci.iterations);
    std::printf("sigma2 95%% CI: [%s, %s] (%d resamples)\n", fmt(log.summary.sigma2_ci.lo).c_str(),
                fmt(log.summary.sigma2_ci.hi).c_str(), log.summary.sigma2_ci.iterations);
    if (cfg.emit.runlog) std::cout << "wrote " << (dir / "runlog.json").string() << "\n";
    if (cfg.emit.diagnostics) std::cout << "wrote " << (dir / "diagnostics.csv").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AuON optimizer toolkit: cosh-RMS update transforms, Newton-Schulz baselines, and a desk-scale training harness"};
    app.require_subcommand(1);

    TransformArgs transform_args;
    CLI::App* transform = app.add_subcommand("transform", "apply an update transform to a matrix");
    transform->add_option("--kind", transform_args.kind,
                          "identity | polar | newton-schulz | cosh-rms | hybrid")->capture_default_str();
    transform->add_option("--matrix", transform_args.matrix, "inline matrix, rows ';'-separated, entries ','-separated");
    transform->add_option("--shape", transform_args.shape, "ROWSxCOLS for a seeded Gaussian input");
    transform->add_option("--seed", transform_args.seed, "seed for the Gaussian input")->capture_default_str();
    transform->add_option("--steps", transform_args.steps, "Newton-Schulz steps (newton-schulz: 5, hybrid: 1)");
    transform->add_option("--coeffs", transform_args.coeffs, "Newton-Schulz coefficients a,b,c");
    transform->add_option("--out", transform_args.out, "output matrix path (default <out-dir>/transform_out.csv)");
    transform->add_option("--out-dir", transform_args.out_dir, "output directory (or $AUON_OUTPUT_DIR)");

    VerifyArgs verify_args;
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the property batteries and print pass/fail per property");
    verify_cmd->add_option("--seed", verify_args.seed, "battery seed")->capture_default_str();
    verify_cmd->add_option("--battery", verify_args.battery, "trust-region sample count")->capture_default_str();
    verify_cmd->add_option("--spike", verify_args.spikes, "run only the tail battery at these spike heights");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "wall-time the transforms on seeded n x n Gaussians");
    bench->add_option("--sizes", bench_args.sizes, "comma-separated sizes")->capture_default_str();
    bench->add_option("--repeats", bench_args.repeats, "timed repetitions per transform")->capture_default_str();
    bench->add_flag("--skip-polar", bench_args.skip_polar, "skip the exact-polar baseline");
    bench->add_option("--out", bench_args.out, "CSV path (default <out-dir>/bench.csv)");
    bench->add_option("--out-dir", bench_args.out_dir, "output directory (or $AUON_OUTPUT_DIR)");

    SpectraArgs spectra_args;
    CLI::App* spectra = app.add_subcommand("spectra", "singular spectrum per Newton-Schulz step");
    spectra->add_option("--shape", spectra_args.shape, "ROWSxCOLS")->capture_default_str();
    spectra->add_option("--seed", spectra_args.seed, "input seed")->capture_default_str();
    spectra->add_option("--steps", spectra_args.steps, "Newton-Schulz steps")->capture_default_str();
    spectra->add_option("--coeffs", spectra_args.coeffs, "coefficients a,b,c (default Muon set)");
    spectra->add_option("--out-dir", spectra_args.out_dir, "output directory (or $AUON_OUTPUT_DIR)");

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "train the blobs MLP and log alignment/update-energy diagnostics");
    train->add_option("--config", train_args.config, "key=value config file; command-line flags take precedence");
    train->add_option("--optimizer", train_args.optimizer, "auon | hybrid | muon | sgdm | adamw")->capture_default_str();
    train->add_option("--lr", train_args.lr, "learning rate (default per optimizer)");
    train->add_option("--momentum", train_args.momentum, "momentum beta");
    train->add_option("--nesterov", train_args.nesterov, "Nesterov lookahead (0/1)");
    train->add_option("--weight-decay", train_args.weight_decay, "decoupled weight decay");
    train->add_option("--ns-steps", train_args.ns_steps, "Newton-Schulz steps for muon/hybrid");
    train->add_option("--seed", train_args.seed, "run seed")->capture_default_str();
    train->add_option("--steps", train_args.steps, "optimization steps")->capture_default_str();
    train->add_option("--n", train_args.n, "dataset size")->capture_default_str();
    train->add_option("--dim", train_args.dim, "input dimension")->capture_default_str();
    train->add_option("--classes", train_args.classes, "class count")->capture_default_str();
    train->add_option("--spread", train_args.spread, "cluster spread")->capture_default_str();
    train->add_option("--hidden", train_args.hidden, "hidden width")->capture_default_str();
    train->add_option("--out-dir", train_args.out_dir, "output directory (or $AUON_OUTPUT_DIR)");
    train->add_flag("--no-runlog", train_args.no_runlog, "skip runlog.json");
    train->add_flag("--no-diagnostics", train_args.no_diagnostics, "skip diagnostics.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (transform->parsed()) return run_transform(transform_args);
        if (verify_cmd->parsed()) return run_verify(verify_args);
        if (bench->parsed()) return run_bench(bench_args);
        if (spectra->parsed()) return run_spectra(spectra_args);
        if (train->parsed()) {
            merge_config_file(train_args, *train);
            return run_train(train_args);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
