#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resobs/dynamics.hpp"
#include "resobs/reservoir.hpp"
#include "resobs/topology.hpp"

namespace resobs {

/// Washout [0, t0), training [t0, t1), prediction [t1, t2]; data sampled every dt.
struct TimeWindows {
    double t0 = 100.0;
    double t1 = 260.0;
    double t2 = 500.0;
    double dt = 0.1;

    void validate() const;
    bool operator==(const TimeWindows&) const = default;
};

enum class SweepParameter { N, D, T0, T1, T2, Delta };

inline constexpr SweepParameter kAllSweepParameters[] = {
    SweepParameter::N,  SweepParameter::D,  SweepParameter::T0,
    SweepParameter::T1, SweepParameter::T2, SweepParameter::Delta};

/// "N", "D", "T0", "T1", "T2", "delta".
std::string_view to_string(SweepParameter p) noexcept;
SweepParameter parse_sweep_parameter(std::string_view name);

/// a, a + inc, ... up to and including b when it is hit exactly. Values are
/// computed as a + i * inc and snapped to 12 decimals, so decimal lists
/// print cleanly.
std::vector<double> range_list(double a, double inc, double b);

/// The lists the original experiments used (delta has no published list;
/// 0.02:0.02:0.4 is used).
std::vector<double> default_sweep_values(SweepParameter p);

struct ExperimentPlan {
    ReservoirConfig base_config;
    RosslerParams rossler;
    StateVec3 initial_state{1.0, 1.0, 1.0};
    TimeWindows times;
    ChannelMap channels;
    std::optional<SweepParameter> swept;
    std::vector<double> values;
    std::size_t seeds_per_value = 10;
    std::uint64_t master_seed = 0;
    std::size_t workers = 1;
    /// Score the prediction against itself; exercises the pipeline with a known answer.
    bool self_test = false;
    bool record_timing = false;

    void validate() const;
};

inline constexpr double kFailedMse = std::numeric_limits<double>::infinity();

struct SweepRecord {
    std::string parameter;
    double value = 0.0;
    std::uint64_t seed = 0;
    double mse = kFailedMse;
    double wall_seconds = 0.0;
    std::string failure;

    bool ok() const noexcept { return failure.empty(); }
};

struct ComparisonRecord {
    TopologyKind kind = TopologyKind::ErdosRenyi;
    std::vector<SweepRecord> trials;
    double median_mse = kFailedMse;
    double mean_mse = kFailedMse;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
};

/// Mean over steps and channels of the squared difference.
double mse(const Trajectory& predicted, const Trajectory& truth);

/// Median of the finite entries; +inf when there are none.
double median_finite(std::vector<double> values);
double mean_finite(const std::vector<double>& values);

/// Config, times and data after applying one swept value.
struct TrialSetup {
    ReservoirConfig config;
    TimeWindows times;
};
TrialSetup apply_value(const ExperimentPlan& plan, double value, std::uint64_t seed);

struct ObserverRun {
    TrainedObserver observer;
    Trajectory truth;     // output channels over [t1, t2]
    Trajectory predicted; // same grid
    double mse = 0.0;
};

/// washout -> collect and train -> observer-mode prediction -> score.
ObserverRun fit_and_predict(const ReservoirConfig& config, const ChannelMap& channels,
                            const Trajectory& data, const TimeWindows& times, bool self_test = false);

/// One full pipeline run. Errors become a failed record (mse = +inf).
SweepRecord run_trial(const ExperimentPlan& plan, double value, std::uint64_t seed);

/// Records in value-major, seed-minor order; identical for any worker count.
/// Throws NumericError when every trial fails.
std::vector<SweepRecord> run_sweep(const ExperimentPlan& plan);

/// seeds_per_value trials per kind at the base configuration. Trial i uses
/// the same seed for every kind.
std::vector<ComparisonRecord> compare_topologies(const ExperimentPlan& plan,
                                                 std::span<const TopologyKind> kinds);

/// Published single-run MSE per topology, used to annotate reports.
double reference_mse(TopologyKind kind) noexcept;

} // namespace resobs
