// Command-line front end: generate | run | sweep <parameter> | compare.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resobs/commands.hpp"
#include "resobs/config.hpp"
#include "resobs/io.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct CommonFlags {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> seeds_per_value;
    std::optional<std::size_t> workers;
    std::vector<std::string> overrides;
};

void add_common(CLI::App& app, CommonFlags& flags) {
    app.add_option("--config", flags.config_path, "key=value configuration file");
    app.add_option("--out", flags.out, "output directory");
    app.add_option("--seed", flags.seed, "master seed");
    app.add_option("--seeds-per-value", flags.seeds_per_value, "trials per swept value / topology");
    app.add_option("--workers", flags.workers, "concurrent trials");
    app.add_option("--set", flags.overrides, "override one key (key=value); repeatable");
}

resobs::RunConfig build_config(const CommonFlags& flags) {
    resobs::ConfigBuilder builder;
    if (!flags.config_path.empty()) {
        builder.apply_document(resobs::read_file(flags.config_path));
    }
    if (flags.out) {
        builder.set("out_dir", *flags.out);
    }
    if (flags.seed) {
        builder.set("seed", std::to_string(*flags.seed));
    }
    if (flags.seeds_per_value) {
        builder.set("seeds_per_value", std::to_string(*flags.seeds_per_value));
    }
    if (flags.workers) {
        builder.set("workers", std::to_string(*flags.workers));
    }
    for (const auto& assignment : flags.overrides) {
        builder.apply_assignment(assignment);
    }
    return builder.finish();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Echo state network observer for the Rossler system"};
    app.require_subcommand(1);
    app.fallthrough();
    CommonFlags flags;
    add_common(app, flags);

    auto* generate = app.add_subcommand("generate", "integrate the Rossler system and write trajectory.csv");
    auto* run = app.add_subcommand("run", "train and evaluate one observer");
    auto* sweep = app.add_subcommand("sweep", "sweep one parameter over its list");
    std::string parameter;
    sweep->add_option("parameter", parameter, "N, D, T0, T1, T2 or delta")->required();
    auto* compare = app.add_subcommand("compare", "compare reservoir topologies");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    resobs::RunConfig config;
    std::optional<resobs::SweepParameter> swept;
    try {
        config = build_config(flags);
        if (sweep->parsed()) {
            swept = resobs::parse_sweep_parameter(parameter);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (generate->parsed()) {
            resobs::cmd_generate(config, std::cout);
        } else if (run->parsed()) {
            resobs::cmd_run(config, std::cout);
        } else if (sweep->parsed()) {
            resobs::cmd_sweep(config, *swept, std::cout);
        } else if (compare->parsed()) {
            resobs::cmd_compare(config, std::cout);
        }
    } catch (const resobs::ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return 0;
}
