#include "resobs/commands.hpp"

#include <chrono>
#include <ostream>
#include <sstream>

#include "resobs/io.hpp"
#include "resobs/svg.hpp"

namespace resobs {

namespace {

std::filesystem::path prepare_out_dir(const RunConfig& config) {
    const std::filesystem::path dir(config.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw std::runtime_error("cannot create output directory " + dir.string() +
                                 (ec ? ": " + ec.message() : std::string()));
    }
    return dir;
}

void write_manifest(const std::filesystem::path& dir, const RunConfig& config, const std::string& command) {
    write_file(dir / "manifest.txt", "# resobs " + command + "\n" + format_config(config));
}

template <class F>
std::string render(F&& writer) {
    std::ostringstream out;
    writer(out);
    return out.str();
}

void warn_radius(const RunConfig& config, std::ostream& log) {
    if (config.reservoir.rho >= 1.0) {
        log << "warning: rho = " << format_shortest(config.reservoir.rho)
            << " >= 1; the echo state property is not guaranteed\n";
    }
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

GenerateResult cmd_generate(const RunConfig& config, std::ostream& log) {
    const auto dir = prepare_out_dir(config);
    const Trajectory data =
        generate_trajectory(config.rossler, config.initial_state, config.times.dt, config.times.t2);
    GenerateResult result{dir / "trajectory.csv", data.num_steps()};
    write_file(result.trajectory_csv, render([&](std::ostream& o) { write_trajectory_csv(o, data); }));
    write_manifest(dir, config, "generate");
    log << "wrote " << result.samples << " samples to " << result.trajectory_csv.string() << '\n';
    return result;
}

RunResult cmd_run(const RunConfig& config, std::ostream& log) {
    const auto dir = prepare_out_dir(config);
    ReservoirConfig reservoir = config.reservoir;
    reservoir.seed = config.seed;
    const Trajectory data =
        generate_trajectory(config.rossler, config.initial_state, config.times.dt, config.times.t2);
    const ObserverRun run = fit_and_predict(reservoir, ChannelMap{}, data, config.times, config.self_test);

    RunResult result;
    result.mse = run.mse;
    result.warnings = run.observer.warnings;
    result.predictions_csv = dir / "predictions.csv";
    result.model_dir = dir / "model";
    write_file(result.predictions_csv,
               render([&](std::ostream& o) { write_predictions_csv(o, run.truth, run.predicted); }));
    write_file(dir / "mse.txt", format_double(run.mse) + "\n");
    save_observer(result.model_dir, run.observer);
    write_manifest(dir, config, "run");

    for (const auto& w : result.warnings) {
        log << "warning: " << w << '\n';
    }
    log << "mse " << format_double(run.mse) << '\n';
    return result;
}

SweepResult cmd_sweep(const RunConfig& config, SweepParameter parameter, std::ostream& log) {
    const auto dir = prepare_out_dir(config);
    const ExperimentPlan plan = make_plan(config, parameter);
    warn_radius(config, log);
    const auto start = std::chrono::steady_clock::now();

    SweepResult result;
    result.records = run_sweep(plan);
    const std::string name(to_string(parameter));
    result.csv = dir / ("sweep_" + name + ".csv");
    result.svg = dir / ("sweep_" + name + ".svg");
    write_file(result.csv, render([&](std::ostream& o) {
                   write_sweep_csv(o, result.records, config.record_timing);
               }));
    write_file(result.svg, render_sweep_svg(result.records, name));
    write_manifest(dir, config, "sweep " + name);

    std::size_t failed = 0;
    for (const auto& r : result.records) {
        failed += r.ok() ? 0 : 1;
    }
    log << "sweep " << name << ": " << result.records.size() << " trials (" << failed
        << " failed) in " << format_double(elapsed_since(start), 4) << " s; wrote "
        << result.csv.string() << '\n';
    return result;
}

CompareResult cmd_compare(const RunConfig& config, std::ostream& log) {
    const auto dir = prepare_out_dir(config);
    const ExperimentPlan plan = make_plan(config, std::nullopt);
    warn_radius(config, log);

    CompareResult result;
    result.records = compare_topologies(plan, config.kinds);
    result.csv = dir / "compare.csv";
    result.summary_csv = dir / "compare_summary.csv";
    result.svg = dir / "compare.svg";
    write_file(result.csv, render([&](std::ostream& o) { write_comparison_csv(o, result.records); }));
    write_file(result.summary_csv,
               render([&](std::ostream& o) { write_comparison_summary_csv(o, result.records); }));
    write_file(result.svg, render_comparison_svg(result.records));
    write_manifest(dir, config, "compare");

    for (const auto& r : result.records) {
        log << to_string(r.kind) << ": median " << format_double(r.median_mse, 6) << ", mean "
            << format_double(r.mean_mse, 6) << " (" << r.n_ok << " ok, " << r.n_failed
            << " failed; reference " << format_double(reference_mse(r.kind), 4) << ")\n";
    }
    return result;
}

} // namespace resobs
