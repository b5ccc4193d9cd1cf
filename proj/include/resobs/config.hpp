#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "resobs/dynamics.hpp"
#include "resobs/errors.hpp"
#include "resobs/harness.hpp"
#include "resobs/reservoir.hpp"

namespace resobs {

/// Everything one CLI invocation needs, as a flat set of named keys.
struct RunConfig {
    ReservoirConfig reservoir;
    RosslerParams rossler;
    StateVec3 initial_state{1.0, 1.0, 1.0};
    TimeWindows times;
    std::uint64_t seed = 0;
    std::size_t seeds_per_value = 10;
    std::size_t workers = 1;
    std::string out_dir = "out";
    /// Sweep values; empty selects the default list of the swept parameter.
    std::vector<double> values;
    std::vector<TopologyKind> kinds{std::begin(kAllTopologies), std::end(kAllTopologies)};
    bool self_test = false;
    bool record_timing = false;

    bool operator==(const RunConfig&) const = default;
};

/// Bad key, bad value or violated invariant, with the line it came from.
class ConfigError : public ParameterError {
public:
    ConfigError(std::string key, std::size_t line, const std::string& message);

    const std::string& key() const noexcept { return key_; }
    /// 1-based line in the document; 0 for command-line overrides and defaults.
    std::size_t line() const noexcept { return line_; }

private:
    std::string key_;
    std::size_t line_;
};

/// Every key a config document may contain, in manifest order.
const std::vector<std::string>& config_keys();

/// Parses a key=value document (one pair per line, '#' starts a comment)
/// on top of the defaults and validates the result.
RunConfig parse_config(std::string_view text);

/// Incremental form used for config files followed by --set overrides.
class ConfigBuilder {
public:
    ConfigBuilder() = default;
    explicit ConfigBuilder(RunConfig base) : config_(std::move(base)) {}

    void apply_document(std::string_view text);
    /// "key=value"; `line` is recorded for error messages.
    void apply_assignment(std::string_view assignment, std::size_t line = 0);
    void set(std::string_view key, std::string_view value, std::size_t line = 0);

    /// Cross-field validation; throws ConfigError.
    RunConfig finish() const;

private:
    RunConfig config_;
    std::map<std::string, std::size_t, std::less<>> lines_;
};

/// Manifest text: every key with its effective value. parse_config of the
/// result reproduces the same RunConfig exactly.
std::string format_config(const RunConfig& config);

/// Shortest decimal text that parses back to the same double.
std::string format_shortest(double v);

ExperimentPlan make_plan(const RunConfig& config, std::optional<SweepParameter> swept);

} // namespace resobs
