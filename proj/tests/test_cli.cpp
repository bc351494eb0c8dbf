// End-to-end tests that drive the installed CLI binary. The binary path is
// injected by the build as AUON_CLI_PATH.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "auon/linalg.hpp"
#include "auon/random.hpp"
#include "auon/transforms.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args) {
    const std::string command = std::string(AUON_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    EXPECT_NE(pipe, nullptr) << command;
    CommandResult result;
    char buffer[4096];
    while (fgets(buffer, sizeof buffer, pipe) != nullptr) {
        result.output += buffer;
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "auon_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

double parse_value(const std::string& output, const std::string& key) {
    const auto pos = output.find(key + ":");
    EXPECT_NE(pos, std::string::npos) << "missing '" << key << "' in:\n" << output;
    if (pos == std::string::npos) return 0.0;
    return std::stod(output.substr(pos + key.size() + 1));
}

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    EXPECT_TRUE(in.good()) << path;
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        lines.push_back(line);
    }
    return lines;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST(CliTransform, CoshRmsMatchesScalarOracle) {
    const fs::path dir = fresh_dir("transform_cosh");
    const CommandResult res =
        run_cli("transform --kind cosh-rms --shape 2x2 --matrix \"1,0;0,0\" --out-dir " + dir.string());
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_NEAR(parse_value(res.output, "rms_statistic"), 1.159859, 1e-5);
    EXPECT_NEAR(parse_value(res.output, "output_spectral_norm"), 0.862174, 1e-5);
    const auto lines = read_lines(dir / "transform_out.csv");
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_NEAR(std::stod(lines[0].substr(0, lines[0].find(','))), 0.862173, 1e-5);
}

TEST(CliTransform, PolarOnZeroMatrixFailsWithMessage) {
    const CommandResult res = run_cli("transform --kind polar --matrix \"0,0;0,0\"");
    EXPECT_NE(res.exit_code, 0);
    EXPECT_NE(res.output.find("zero matrix"), std::string::npos) << res.output;
}

TEST(CliTransform, IdentityEchoesInput) {
    const fs::path dir = fresh_dir("transform_identity");
    const CommandResult res =
        run_cli("transform --kind identity --matrix \"1.5,-2;0.25,4\" --out-dir " + dir.string());
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const auto lines = read_lines(dir / "transform_out.csv");
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0], "1.5,-2");
    EXPECT_EQ(lines[1], "0.25,4");
}

TEST(CliTransform, RejectsUnknownKind) {
    EXPECT_NE(run_cli("transform --kind banana --shape 4x4").exit_code, 0);
}

TEST(CliVerify, SpikeBatteryAndDeterminism) {
    const CommandResult a = run_cli("verify --spike 5");
    ASSERT_EQ(a.exit_code, 0) << a.output;
    EXPECT_NE(a.output.find("tail-suppression"), std::string::npos);
    EXPECT_NE(a.output.find("PASS"), std::string::npos);

    const CommandResult b = run_cli("verify --seed 3 --battery 68");
    const CommandResult c = run_cli("verify --seed 3 --battery 68");
    ASSERT_EQ(b.exit_code, 0) << b.output;
    EXPECT_EQ(b.output, c.output);  // identical margins for identical seeds
}

TEST(CliBench, CsvSchemaAndRows) {
    const fs::path dir = fresh_dir("bench");
    const CommandResult res = run_cli("bench --sizes 16,32 --repeats 1 --skip-polar --out-dir " + dir.string());
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const auto lines = read_lines(dir / "bench.csv");
    ASSERT_GE(lines.size(), 7u);
    EXPECT_EQ(lines[0], "size,transform,mean_seconds,std_seconds");
    int auon_rows = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].find(",auon,") != std::string::npos) ++auon_rows;
    }
    EXPECT_EQ(auon_rows, 2);  // one per size
    EXPECT_NE(run_cli("bench --sizes 8 --repeats 1").exit_code, 0);
    EXPECT_NE(run_cli("bench --sizes 32 --repeats 0").exit_code, 0);
}

TEST(CliSpectra, SchemaRowCountAndOracleSpectrum) {
    const fs::path dir = fresh_dir("spectra");
    const CommandResult res = run_cli("spectra --shape 8x8 --seed 5 --steps 3 --out-dir " + dir.string());
    ASSERT_EQ(res.exit_code, 0) << res.output;

    const auto spectra = read_lines(dir / "spectra.csv");
    EXPECT_EQ(spectra[0], "step,index,sigma");
    EXPECT_EQ(spectra.size(), 1u + (3u + 1u) * 8u);

    const auto gram = read_lines(dir / "gram.csv");
    EXPECT_EQ(gram[0], "step,frobenius_distance_to_identity");
    EXPECT_EQ(gram.size(), 1u + 4u);

    // step-0 rows are the oracle spectrum of the normalized input
    const auto oracle = auon::linalg::singular_values(
        auon::transforms::normalize_frobenius(auon::rng::gaussian_matrix(8, 8, 5)));
    for (std::size_t i = 0; i < 8; ++i) {
        std::stringstream row(spectra[1 + i]);
        std::string step, index, sigma;
        std::getline(row, step, ',');
        std::getline(row, index, ',');
        std::getline(row, sigma, ',');
        EXPECT_EQ(step, "0");
        EXPECT_NEAR(std::stod(sigma), oracle[i], 1e-9);
    }
}

TEST(CliSpectra, GramDistanceDecreasesOverFiveMuonSteps) {
    const fs::path dir = fresh_dir("spectra_muon");
    ASSERT_EQ(run_cli("spectra --shape 64x64 --seed 12 --steps 5 --out-dir " + dir.string()).exit_code, 0);
    const auto gram = read_lines(dir / "gram.csv");
    ASSERT_EQ(gram.size(), 7u);
    double prev = 1e300;
    for (std::size_t i = 1; i < gram.size(); ++i) {
        const double dist = std::stod(gram[i].substr(gram[i].find(',') + 1));
        EXPECT_LT(dist, prev) << gram[i];
        prev = dist;
    }
}

TEST(CliTrain, ZeroLearningRateGivesConstantLossColumn) {
    const fs::path dir = fresh_dir("train_lr0");
    const CommandResult res =
        run_cli("train --optimizer sgdm --lr 0 --steps 6 --out-dir " + dir.string());
    ASSERT_EQ(res.exit_code, 0) << res.output;
    const auto lines = read_lines(dir / "diagnostics.csv");
    ASSERT_EQ(lines[0], "step,loss,kappa_median_sofar,sigma2_mean_sofar");
    ASSERT_EQ(lines.size(), 7u);
    std::string first_loss;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::stringstream row(lines[i]);
        std::string step, loss;
        std::getline(row, step, ',');
        std::getline(row, loss, ',');
        if (i == 1) {
            first_loss = loss;
        } else {
            EXPECT_EQ(loss, first_loss);
        }
    }
}

TEST(CliTrain, DefaultRunSummaryInExpectedRegime) {
    const fs::path dir = fresh_dir("train_default");
    const CommandResult res = run_cli("train --out-dir " + dir.string());
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_GT(parse_value(res.output, "kappa_median"), 0.0);
    const double sigma2 = parse_value(res.output, "sigma2_mean");
    EXPECT_GT(sigma2, 0.9);
    EXPECT_LE(sigma2, 1.0);
    EXPECT_TRUE(fs::exists(dir / "runlog.json"));
    EXPECT_TRUE(fs::exists(dir / "diagnostics.csv"));
}

TEST(CliTrain, SameSeedGivesByteIdenticalDiagnostics) {
    const fs::path a = fresh_dir("train_det_a");
    const fs::path b = fresh_dir("train_det_b");
    ASSERT_EQ(run_cli("train --steps 10 --out-dir " + a.string()).exit_code, 0);
    ASSERT_EQ(run_cli("train --steps 10 --out-dir " + b.string()).exit_code, 0);
    EXPECT_EQ(read_file(a / "diagnostics.csv"), read_file(b / "diagnostics.csv"));

    // runlog.json differs only in the echoed output_dir
    const auto strip_dir_line = [](const fs::path& path) {
        std::string kept;
        for (const std::string& line : read_lines(path)) {
            if (line.find("output_dir") == std::string::npos) {
                kept += line + "\n";
            }
        }
        return kept;
    };
    EXPECT_EQ(strip_dir_line(a / "runlog.json"), strip_dir_line(b / "runlog.json"));
}

TEST(CliTrain, ConfigFileWithFlagPrecedence) {
    const fs::path dir = fresh_dir("train_config");
    const fs::path cfg = dir / "run.cfg";
    {
        std::ofstream out(cfg);
        out << "# comment line\n";
        out << "optimizer=sgdm\n";
        out << "lr=0.05\n";
        out << "seed=9\n";
        out << "steps=12\n";
    }
    const CommandResult from_config =
        run_cli("train --config " + cfg.string() + " --steps 4 --out-dir " + (dir / "a").string());
    ASSERT_EQ(from_config.exit_code, 0) << from_config.output;
    const CommandResult from_flags =
        run_cli("train --optimizer sgdm --lr 0.05 --seed 9 --steps 4 --out-dir " + (dir / "b").string());
    ASSERT_EQ(from_flags.exit_code, 0) << from_flags.output;
    EXPECT_EQ(read_file(dir / "a" / "diagnostics.csv"), read_file(dir / "b" / "diagnostics.csv"));
}

TEST(CliTrain, OutputDirEnvironmentFallback) {
    const fs::path dir = fresh_dir("train_envdir");
    setenv("AUON_OUTPUT_DIR", dir.c_str(), 1);
    const CommandResult res = run_cli("train --steps 3");
    unsetenv("AUON_OUTPUT_DIR");
    ASSERT_EQ(res.exit_code, 0) << res.output;
    EXPECT_TRUE(fs::exists(dir / "diagnostics.csv"));
}
