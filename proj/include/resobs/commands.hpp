#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "resobs/config.hpp"
#include "resobs/harness.hpp"

namespace resobs {

struct GenerateResult {
    std::filesystem::path trajectory_csv;
    std::size_t samples = 0;
};

struct RunResult {
    double mse = 0.0;
    std::filesystem::path predictions_csv;
    std::filesystem::path model_dir;
    std::vector<std::string> warnings;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    std::filesystem::path csv;
    std::filesystem::path svg;
};

struct CompareResult {
    std::vector<ComparisonRecord> records;
    std::filesystem::path csv;
    std::filesystem::path summary_csv;
    std::filesystem::path svg;
};

/// <out>/trajectory.csv
GenerateResult cmd_generate(const RunConfig& config, std::ostream& log);

/// Single train + predict with reservoir seed = config.seed. Writes
/// predictions.csv, mse.txt, model/ and manifest.txt.
RunResult cmd_run(const RunConfig& config, std::ostream& log);

/// sweep_<P>.csv and sweep_<P>.svg, plus manifest.txt.
SweepResult cmd_sweep(const RunConfig& config, SweepParameter parameter, std::ostream& log);

/// compare.csv, compare_summary.csv, compare.svg, plus manifest.txt.
CompareResult cmd_compare(const RunConfig& config, std::ostream& log);

} // namespace resobs
