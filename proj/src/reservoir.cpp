#include "resobs/reservoir.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "resobs/errors.hpp"
#include "resobs/random.hpp"

namespace resobs {

namespace {

ChannelMap default_channels(std::size_t k, std::size_t l) {
    if (k == 1 && l == 2) {
        return {};
    }
    ChannelMap map;
    map.inputs.clear();
    map.outputs.clear();
    for (std::size_t i = 0; i < k; ++i) {
        map.inputs.push_back("u" + std::to_string(i));
    }
    for (std::size_t i = 0; i < l; ++i) {
        map.outputs.push_back("v" + std::to_string(i));
    }
    return map;
}

const Eigen::MatrixXd& checked_inputs(const TrainedObserver& obs, const Trajectory& input) {
    if (input.num_channels() != obs.k_inputs()) {
        throw ParameterError("observer expects " + std::to_string(obs.k_inputs()) +
                             " input channels, trajectory has " +
                             std::to_string(input.num_channels()));
    }
    if (!input.samples().allFinite()) {
        throw ParameterError("observer input contains non-finite samples");
    }
    return input.samples();
}

// The shared inner loop. `pre` is scratch space of size n.
void step_in_place(const TrainedObserver& obs, ReservoirState& r, const Eigen::Ref<const Eigen::VectorXd>& x,
                   Eigen::VectorXd& pre) {
    const double alpha = obs.config.alpha;
    pre.noalias() = obs.w.storage() * r;
    pre.noalias() += obs.w_in * x;
    pre.array() += obs.config.zeta;
    if (alpha == 1.0) {
        r = pre.array().tanh().matrix();
    } else {
        r = (1.0 - alpha) * r + alpha * pre.array().tanh().matrix();
    }
}

} // namespace

void ReservoirConfig::validate() const {
    if (n < 2) {
        throw ParameterError("n: reservoir needs at least 2 nodes");
    }
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw ParameterError("rho: spectral radius must be positive and finite");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw ParameterError("alpha: leakage rate must satisfy 0 < alpha <= 1");
    }
    if (!std::isfinite(zeta)) {
        throw ParameterError("zeta: bias must be finite");
    }
    if (!(input_scale >= 0.0) || !std::isfinite(input_scale)) {
        throw ParameterError("input_scale: must be finite and >= 0");
    }
    if (!(ridge_beta >= 0.0) || !std::isfinite(ridge_beta)) {
        throw ParameterError("ridge_beta: must be finite and >= 0");
    }
    topology_spec().validate();
}

TrainedObserver init_observer(const ReservoirConfig& config, std::size_t k_inputs,
                              std::size_t l_outputs) {
    return init_observer(config, default_channels(k_inputs, l_outputs));
}

TrainedObserver init_observer(const ReservoirConfig& config, const ChannelMap& channels) {
    config.validate();
    if (channels.inputs.empty() || channels.outputs.empty()) {
        throw ParameterError("observer needs at least one input and one output channel");
    }
    TrainedObserver obs;
    obs.config = config;
    obs.channels = channels;

    const WeightedMatrix skeleton =
        build_skeleton(config.topology_spec(), stream_seed(config.seed, Stream::Skeleton));
    obs.w = scale_to_radius(assign_weights(skeleton, stream_seed(config.seed, Stream::Weights)),
                            config.rho);

    const auto n = static_cast<Eigen::Index>(config.n);
    const auto k = static_cast<Eigen::Index>(channels.inputs.size());
    const auto l = static_cast<Eigen::Index>(channels.outputs.size());
    Rng rng(stream_seed(config.seed, Stream::Input));
    obs.w_in.resize(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            obs.w_in(i, j) = rng.uniform(-config.input_scale, config.input_scale);
        }
    }
    obs.w_out = Eigen::MatrixXd::Zero(l, n);
    obs.c = Eigen::VectorXd::Zero(l);
    obs.trained = false;

    if (config.rho >= 1.0) {
        obs.warnings.push_back("spectral radius rho = " + std::to_string(config.rho) +
                               " >= 1: the echo state property is not guaranteed");
    }
    return obs;
}

ReservoirState update_state(const TrainedObserver& obs, const ReservoirState& r,
                            const Eigen::VectorXd& x) {
    if (static_cast<std::size_t>(r.size()) != obs.n() ||
        static_cast<std::size_t>(x.size()) != obs.k_inputs()) {
        throw ParameterError("update_state: dimension mismatch");
    }
    ReservoirState next = r;
    Eigen::VectorXd pre(r.size());
    step_in_place(obs, next, x, pre);
    return next;
}

StateRollout collect_states(const TrainedObserver& obs, const Trajectory& input,
                            const ReservoirState& r0) {
    const Eigen::MatrixXd& u = checked_inputs(obs, input);
    if (static_cast<std::size_t>(r0.size()) != obs.n()) {
        throw ParameterError("collect_states: initial state has wrong dimension");
    }
    StateRollout out;
    out.states.resize(u.rows(), r0.size());
    ReservoirState r = r0;
    Eigen::VectorXd pre(r0.size());
    for (Eigen::Index t = 0; t < u.rows(); ++t) {
        step_in_place(obs, r, u.row(t).transpose(), pre);
        out.states.row(t) = r.transpose();
    }
    out.final_state = std::move(r);
    return out;
}

ReservoirState advance(const TrainedObserver& obs, const Trajectory& input, const ReservoirState& r0) {
    const Eigen::MatrixXd& u = checked_inputs(obs, input);
    if (static_cast<std::size_t>(r0.size()) != obs.n()) {
        throw ParameterError("advance: initial state has wrong dimension");
    }
    ReservoirState r = r0;
    Eigen::VectorXd pre(r0.size());
    for (Eigen::Index t = 0; t < u.rows(); ++t) {
        step_in_place(obs, r, u.row(t).transpose(), pre);
    }
    return r;
}

Readout train_readout(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets,
                      double ridge_beta) {
    if (states.rows() != targets.rows()) {
        throw ParameterError("train_readout: " + std::to_string(states.rows()) + " state rows vs " +
                             std::to_string(targets.rows()) + " target rows");
    }
    if (states.rows() == 0) {
        throw ParameterError("train_readout: no training rows");
    }
    if (!(ridge_beta >= 0.0) || !std::isfinite(ridge_beta)) {
        throw ParameterError("train_readout: ridge_beta must be finite and >= 0");
    }
    const Eigen::Index rows = states.rows();
    const Eigen::Index n = states.cols();
    const Eigen::Index l = targets.cols();

    // Normal matrix of [S 1]; the bias (last) coordinate is not penalised.
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n + 1, n + 1);
    gram.topLeftCorner(n, n).selfadjointView<Eigen::Lower>().rankUpdate(states.transpose());
    gram.topLeftCorner(n, n).triangularView<Eigen::StrictlyUpper>() =
        gram.topLeftCorner(n, n).transpose();
    const Eigen::VectorXd col_sums = states.colwise().sum().transpose();
    gram.block(0, n, n, 1) = col_sums;
    gram.block(n, 0, 1, n) = col_sums.transpose();
    gram(n, n) = static_cast<double>(rows);
    gram.topLeftCorner(n, n).diagonal().array() += ridge_beta;

    Eigen::MatrixXd rhs(n + 1, l);
    rhs.topRows(n).noalias() = states.transpose() * targets;
    rhs.row(n) = targets.colwise().sum();

    Eigen::MatrixXd solution;
    if (ridge_beta > 0.0) {
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) {
            throw NumericError("train_readout: normal matrix is not positive definite");
        }
        solution = llt.solve(rhs);
    } else {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
        const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
        if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-13 ||
            !(pivots.minCoeff() > 1e-13 * pivots.maxCoeff())) {
            throw NumericError(
                "train_readout: normal matrix is singular with ridge_beta = 0; use ridge_beta > 0");
        }
        solution = ldlt.solve(rhs);
    }
    if (!solution.allFinite()) {
        throw NumericError("train_readout: solution is not finite");
    }

    Readout out;
    out.w_out = solution.topRows(n).transpose();
    out.c = solution.row(n).transpose();
    out.underdetermined = rows < n + 1;
    return out;
}

void set_readout(TrainedObserver& obs, Readout readout) {
    if (static_cast<std::size_t>(readout.w_out.cols()) != obs.n() ||
        static_cast<std::size_t>(readout.w_out.rows()) != obs.channels.outputs.size() ||
        readout.c.size() != readout.w_out.rows()) {
        throw ParameterError("readout dimensions do not match the observer");
    }
    obs.w_out = std::move(readout.w_out);
    obs.c = std::move(readout.c);
    obs.trained = true;
    if (readout.underdetermined) {
        obs.warnings.push_back("readout trained on fewer rows than n + 1 unknowns");
    }
}

Eigen::MatrixXd readout_outputs(const TrainedObserver& obs, const Eigen::MatrixXd& states) {
    Eigen::MatrixXd y = states * obs.w_out.transpose();
    y.rowwise() += obs.c.transpose();
    return y;
}

Trajectory predict(const TrainedObserver& obs, const Trajectory& input, const ReservoirState& r0) {
    if (!obs.trained) {
        throw ParameterError("predict: observer readout has not been trained");
    }
    const Eigen::MatrixXd& u = checked_inputs(obs, input);
    if (static_cast<std::size_t>(r0.size()) != obs.n()) {
        throw ParameterError("predict: initial state has wrong dimension");
    }
    Eigen::MatrixXd y(u.rows(), static_cast<Eigen::Index>(obs.l_outputs()));
    ReservoirState r = r0;
    Eigen::VectorXd pre(r0.size());
    for (Eigen::Index t = 0; t < u.rows(); ++t) {
        step_in_place(obs, r, u.row(t).transpose(), pre);
        y.row(t) = (obs.w_out * r + obs.c).transpose();
    }
    return Trajectory(input.t0(), input.dt(), obs.channels.outputs, std::move(y), input.offset());
}

} // namespace resobs
