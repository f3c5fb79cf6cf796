#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qubitbath/algebra.hpp"
#include "qubitbath/config.hpp"

namespace qubitbath {

inline constexpr std::string_view artifact_version = "0.1.0";

enum ExitCode : int { ExitOk = 0, ExitValidation = 2, ExitIntegration = 3 };

struct RunSeries {
    std::vector<double> t;
    std::vector<DensityMatrix> rho;
    nlohmann::json diagnostics = nlohmann::json::object();
};

/// Runs the configured method without touching the filesystem.
/// Throws ValidationError, StepFailure or NanDetected.
RunSeries simulate(const RunConfig& cfg);

std::string csv_header();
void write_csv(std::ostream& os, const RunSeries& series);

struct RunOutcome {
    std::string name;
    int exit_code = ExitOk;
    std::filesystem::path csv;
    std::filesystem::path metadata;
    std::string message;
};

/// Writes <output_path>/<name>.csv and <name>.json. Never throws; failures
/// become exit codes and leave no files behind.
RunOutcome run(const RunConfig& cfg);

/// Runs independent configurations in a small work pool; results keep input order.
std::vector<RunOutcome> run_all(std::span<const RunConfig> cfgs, unsigned threads = 0);

/// One configuration per value with the axis set and the name suffixed by the value.
std::vector<RunConfig> sweep_configs(const RunConfig& base, std::string_view axis, std::span<const double> values);

std::vector<RunOutcome> sweep(const RunConfig& base, std::string_view axis, std::span<const double> values,
                              unsigned threads = 0);

/// Largest per-run exit code, 0 for no runs.
int aggregate_exit(std::span<const RunOutcome> outcomes);

/// Reads a CSV written by run() back into a time series (diagnostic columns ignored).
RunSeries read_csv(const std::filesystem::path& file);

}  // namespace qubitbath
