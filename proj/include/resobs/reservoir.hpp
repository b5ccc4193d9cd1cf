#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "resobs/dynamics.hpp"
#include "resobs/topology.hpp"

namespace resobs {

/// Scalar hyperparameters of one echo state network.
struct ReservoirConfig {
    std::size_t n = 400;
    double rho = 1.0;
    double mean_degree = 20.0;
    double zeta = 1.0;
    double alpha = 1.0;
    double input_scale = 1.0;
    double ridge_beta = 1e-6;
    TopologyKind topology = TopologyKind::ErdosRenyi;
    double rewire_prob = 0.1;
    std::uint64_t seed = 0;

    TopologySpec topology_spec() const { return {topology, n, mean_degree, rewire_prob}; }

    /// Throws ParameterError naming the offending field.
    void validate() const;

    bool operator==(const ReservoirConfig&) const = default;
};

/// Which trajectory channels drive the reservoir and which the readout estimates.
struct ChannelMap {
    std::vector<std::string> inputs{"x"};
    std::vector<std::string> outputs{"y", "z"};

    bool operator==(const ChannelMap&) const = default;
};

using ReservoirState = Eigen::VectorXd;

struct TrainedObserver {
    ReservoirConfig config;
    ChannelMap channels;
    WeightedMatrix w;
    Eigen::MatrixXd w_in;  // n x K
    Eigen::MatrixXd w_out; // L x n
    Eigen::VectorXd c;     // L
    bool trained = false;
    std::vector<std::string> warnings;

    std::size_t n() const noexcept { return w.n(); }
    std::size_t k_inputs() const noexcept { return static_cast<std::size_t>(w_in.cols()); }
    std::size_t l_outputs() const noexcept { return static_cast<std::size_t>(w_out.rows()); }
};

/// Builds W through the topology module, rescales it to config.rho and draws
/// W_in uniformly on [-input_scale, input_scale]. The readout starts at zero
/// and untrained. Channel names default to x -> (y, z) when K = 1, L = 2,
/// otherwise u0.. / v0...
TrainedObserver init_observer(const ReservoirConfig& config, std::size_t k_inputs,
                              std::size_t l_outputs);
TrainedObserver init_observer(const ReservoirConfig& config, const ChannelMap& channels);

/// r' = (1 - alpha) r + alpha tanh(W r + W_in x + zeta).
ReservoirState update_state(const TrainedObserver& obs, const ReservoirState& r,
                            const Eigen::VectorXd& x);

struct StateRollout {
    Eigen::MatrixXd states; // steps x n; row i is the state after consuming input i
    ReservoirState final_state;
};

/// Drives the reservoir with every row of `input` (columns = observer inputs).
StateRollout collect_states(const TrainedObserver& obs, const Trajectory& input,
                            const ReservoirState& r0);

/// As collect_states but keeps only the final state.
ReservoirState advance(const TrainedObserver& obs, const Trajectory& input, const ReservoirState& r0);

struct Readout {
    Eigen::MatrixXd w_out; // L x n
    Eigen::VectorXd c;     // L
    /// Fewer rows than unknowns (n + 1); the fit is determined only by the ridge term.
    bool underdetermined = false;
};

/// Ridge regression min ||S W^T + 1 c^T - Y||^2 + beta ||W||^2 with an
/// unpenalised bias, solved through the augmented normal equations.
Readout train_readout(const Eigen::MatrixXd& states, const Eigen::MatrixXd& targets,
                      double ridge_beta);

void set_readout(TrainedObserver& obs, Readout readout);

/// Observer-mode inference: the measured input keeps driving the reservoir and
/// y(t) = W_out r(t) + c is emitted at every step.
Trajectory predict(const TrainedObserver& obs, const Trajectory& input, const ReservoirState& r0);

/// Applies the trained readout to an already collected state matrix.
Eigen::MatrixXd readout_outputs(const TrainedObserver& obs, const Eigen::MatrixXd& states);

} // namespace resobs
