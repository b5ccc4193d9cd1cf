#include "resobs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

#include "resobs/errors.hpp"
#include "resobs/random.hpp"

namespace resobs {

namespace {

double snap_decimal(double v) {
    constexpr double kScale = 1e12;
    if (std::abs(v) * kScale >= 0x1.0p52) {
        return v;
    }
    return std::round(v * kScale) / kScale;
}

std::size_t checked_count(double value, std::string_view what, std::size_t minimum) {
    if (!(value >= static_cast<double>(minimum)) || value != std::floor(value) || value > 1e9) {
        throw ParameterError(std::string(what) + " must be an integer >= " +
                             std::to_string(minimum) + "; got " + std::to_string(value));
    }
    return static_cast<std::size_t>(value);
}

// Runs job(i) for i in [0, count) on `workers` threads. Each job writes only
// to its own slot, so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                job(i);
            }
        });
    }
}

std::string failure_summary(const std::vector<SweepRecord>& records) {
    return std::to_string(records.size()) + " of " + std::to_string(records.size()) +
           " trials failed; first failure: " + (records.empty() ? "none" : records.front().failure);
}

} // namespace

void TimeWindows::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ParameterError("dt: time step must be positive and finite");
    }
    if (!(t0 >= 0.0) || !(t0 < t1) || !(t1 < t2) || !std::isfinite(t2)) {
        throw ParameterError("time windows must satisfy 0 <= T0 < T1 < T2; got T0=" +
                             std::to_string(t0) + ", T1=" + std::to_string(t1) +
                             ", T2=" + std::to_string(t2));
    }
}

std::string_view to_string(SweepParameter p) noexcept {
    switch (p) {
    case SweepParameter::N:
        return "N";
    case SweepParameter::D:
        return "D";
    case SweepParameter::T0:
        return "T0";
    case SweepParameter::T1:
        return "T1";
    case SweepParameter::T2:
        return "T2";
    case SweepParameter::Delta:
        return "delta";
    }
    return "unknown";
}

SweepParameter parse_sweep_parameter(std::string_view name) {
    for (SweepParameter p : kAllSweepParameters) {
        if (name == to_string(p)) {
            return p;
        }
    }
    throw ParameterError("unknown sweep parameter '" + std::string(name) +
                         "' (expected N, D, T0, T1, T2 or delta)");
}

std::vector<double> range_list(double a, double inc, double b) {
    if (!(inc > 0.0) || !std::isfinite(inc)) {
        throw ParameterError("range increment must be positive; got " + std::to_string(inc));
    }
    if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
        throw ParameterError("range start must not exceed its end");
    }
    const auto count = static_cast<std::size_t>(std::floor((b - a) / inc + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(snap_decimal(a + static_cast<double>(i) * inc));
    }
    return out;
}

std::vector<double> default_sweep_values(SweepParameter p) {
    switch (p) {
    case SweepParameter::N:
        return range_list(50, 50, 2000);
    case SweepParameter::D:
        return range_list(10, 20, 390);
    case SweepParameter::T0:
        return range_list(10, 10, 200);
    case SweepParameter::T1:
        return range_list(260, 10, 450);
    case SweepParameter::T2:
        return range_list(450, 10, 800);
    case SweepParameter::Delta:
        return range_list(0.02, 0.02, 0.4);
    }
    return {};
}

TrialSetup apply_value(const ExperimentPlan& plan, double value, std::uint64_t seed) {
    TrialSetup setup{plan.base_config, plan.times};
    setup.config.seed = seed;
    if (plan.swept) {
        switch (*plan.swept) {
        case SweepParameter::N:
            setup.config.n = checked_count(value, "N", 2);
            break;
        case SweepParameter::D:
            setup.config.mean_degree = value;
            break;
        case SweepParameter::T0:
            setup.times.t0 = value;
            break;
        case SweepParameter::T1:
            setup.times.t1 = value;
            break;
        case SweepParameter::T2:
            setup.times.t2 = value;
            break;
        case SweepParameter::Delta:
            setup.times.dt = value;
            break;
        }
    }
    setup.config.validate();
    setup.times.validate();
    return setup;
}

void ExperimentPlan::validate() const {
    rossler.validate();
    if (!initial_state.is_finite()) {
        throw ParameterError("initial state must be finite");
    }
    if (seeds_per_value < 1) {
        throw ParameterError("seeds_per_value must be at least 1");
    }
    if (workers < 1) {
        throw ParameterError("workers must be at least 1");
    }
    if (channels.inputs.empty() || channels.outputs.empty()) {
        throw ParameterError("plan needs at least one input and one output channel");
    }
    if (!swept) {
        apply_value(*this, 0.0, 0);
        return;
    }
    if (values.empty()) {
        throw ParameterError("sweep over " + std::string(to_string(*swept)) + " has no values");
    }
    for (double v : values) {
        try {
            apply_value(*this, v, 0);
        } catch (const ParameterError& e) {
            throw ParameterError(std::string(to_string(*swept)) + "=" + std::to_string(v) +
                                 " is invalid: " + e.what());
        }
    }
}

double mse(const Trajectory& predicted, const Trajectory& truth) {
    const auto& p = predicted.samples();
    const auto& t = truth.samples();
    if (p.rows() != t.rows() || p.cols() != t.cols()) {
        throw ParameterError("mse: shape mismatch (" + std::to_string(p.rows()) + "x" +
                             std::to_string(p.cols()) + " vs " + std::to_string(t.rows()) + "x" +
                             std::to_string(t.cols()) + ")");
    }
    if (p.size() == 0) {
        throw ParameterError("mse: empty series");
    }
    return (p - t).squaredNorm() / static_cast<double>(p.size());
}

double median_finite(std::vector<double> values) {
    std::erase_if(values, [](double v) { return !std::isfinite(v); });
    if (values.empty()) {
        return kFailedMse;
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double mean_finite(const std::vector<double>& values) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : values) {
        if (std::isfinite(v)) {
            sum += v;
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : kFailedMse;
}

ObserverRun fit_and_predict(const ReservoirConfig& config, const ChannelMap& channels,
                            const Trajectory& data, const TimeWindows& times, bool self_test) {
    times.validate();
    const Trajectory inputs = data.select(channels.inputs);
    const Trajectory targets = data.select(channels.outputs);

    const std::size_t train_begin = data.first_index_at_or_after(times.t0);
    const std::size_t predict_begin = data.first_index_at_or_after(times.t1);
    const std::size_t predict_end = data.end_index_at_or_before(times.t2);
    if (!(train_begin < predict_begin && predict_begin < predict_end)) {
        throw ParameterError("time windows select an empty training or prediction range");
    }

    TrainedObserver obs = init_observer(config, channels);
    const ReservoirState r0 = ReservoirState::Zero(static_cast<Eigen::Index>(config.n));
    const ReservoirState washed = advance(obs, inputs.slice(0, train_begin), r0);
    StateRollout train = collect_states(obs, inputs.slice(train_begin, predict_begin), washed);
    set_readout(obs, train_readout(train.states,
                                   targets.slice(train_begin, predict_begin).samples(),
                                   config.ridge_beta));

    Trajectory predicted = predict(obs, inputs.slice(predict_begin, predict_end), train.final_state);
    Trajectory truth = self_test ? predicted : targets.slice(predict_begin, predict_end);
    const double score = mse(predicted, truth);
    return {std::move(obs), std::move(truth), std::move(predicted), score};
}

SweepRecord run_trial(const ExperimentPlan& plan, double value, std::uint64_t seed) {
    SweepRecord rec;
    rec.parameter = plan.swept ? std::string(to_string(*plan.swept)) : std::string("none");
    rec.value = value;
    rec.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        const TrialSetup setup = apply_value(plan, value, seed);
        const Trajectory data =
            generate_trajectory(plan.rossler, plan.initial_state, setup.times.dt, setup.times.t2);
        const ObserverRun run =
            fit_and_predict(setup.config, plan.channels, data, setup.times, plan.self_test);
        if (!std::isfinite(run.mse)) {
            throw NumericError("prediction error is not finite");
        }
        rec.mse = run.mse;
    } catch (const std::exception& e) {
        rec.mse = kFailedMse;
        rec.failure = e.what();
        if (rec.failure.empty()) {
            rec.failure = "unknown failure";
        }
    }
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::vector<SweepRecord> run_sweep(const ExperimentPlan& plan) {
    plan.validate();
    const std::vector<double> values = plan.swept ? plan.values : std::vector<double>{0.0};
    const std::string name = plan.swept ? std::string(to_string(*plan.swept)) : "none";
    const std::size_t per_value = plan.seeds_per_value;

    std::vector<SweepRecord> records(values.size() * per_value);
    parallel_for(records.size(), plan.workers, [&](std::size_t slot) {
        const std::size_t vi = slot / per_value;
        const std::size_t ti = slot % per_value;
        records[slot] = run_trial(plan, values[vi], derive_seed(plan.master_seed, name, vi, ti));
    });

    const bool any_ok = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.ok(); });
    if (!any_ok) {
        throw NumericError("sweep failed: " + failure_summary(records));
    }
    return records;
}

std::vector<ComparisonRecord> compare_topologies(const ExperimentPlan& plan,
                                                 std::span<const TopologyKind> kinds) {
    if (kinds.empty()) {
        throw ParameterError("compare_topologies needs at least one topology");
    }
    std::vector<ExperimentPlan> plans;
    for (TopologyKind kind : kinds) {
        ExperimentPlan p = plan;
        p.swept.reset();
        p.values.clear();
        p.base_config.topology = kind;
        p.validate();
        plans.push_back(std::move(p));
    }

    const std::size_t per_kind = plan.seeds_per_value;
    std::vector<SweepRecord> trials(kinds.size() * per_kind);
    parallel_for(trials.size(), plan.workers, [&](std::size_t slot) {
        const std::size_t ki = slot / per_kind;
        const std::size_t ti = slot % per_kind;
        trials[slot] = run_trial(plans[ki], 0.0, derive_seed(plan.master_seed, "topology", 0, ti));
        trials[slot].parameter = "topology";
    });

    const bool any_ok = std::any_of(trials.begin(), trials.end(), [](const auto& r) { return r.ok(); });
    if (!any_ok) {
        throw NumericError("comparison failed: " + failure_summary(trials));
    }

    std::vector<ComparisonRecord> out;
    for (std::size_t ki = 0; ki < kinds.size(); ++ki) {
        ComparisonRecord rec;
        rec.kind = kinds[ki];
        std::vector<double> mses;
        for (std::size_t ti = 0; ti < per_kind; ++ti) {
            const SweepRecord& t = trials[ki * per_kind + ti];
            rec.trials.push_back(t);
            mses.push_back(t.mse);
            (t.ok() ? rec.n_ok : rec.n_failed) += 1;
        }
        rec.median_mse = median_finite(mses);
        rec.mean_mse = mean_finite(mses);
        out.push_back(std::move(rec));
    }
    return out;
}

double reference_mse(TopologyKind kind) noexcept {
    switch (kind) {
    case TopologyKind::ErdosRenyi:
        return 0.0669;
    case TopologyKind::RandomMatrix:
        return 0.1811;
    case TopologyKind::BarabasiAlbert:
        return 0.0808;
    case TopologyKind::SmallWorld:
        return 0.1638;
    }
    return 0.0;
}

} // namespace resobs
