#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace resobs {

/// Coefficients of dx/dt = -y - z, dy/dt = x + a*y, dz/dt = b + z*(x - c).
struct RosslerParams {
    double a = 0.5;
    double b = 2.0;
    double c = 4.0;

    void validate() const;
    bool operator==(const RosslerParams&) const = default;
};

struct StateVec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool is_finite() const noexcept;
    double max_abs() const noexcept;
    bool operator==(const StateVec3&) const = default;
};

inline StateVec3 operator+(StateVec3 l, const StateVec3& r) noexcept {
    return {l.x + r.x, l.y + r.y, l.z + r.z};
}
inline StateVec3 operator*(double k, const StateVec3& s) noexcept {
    return {k * s.x, k * s.y, k * s.z};
}

/// Uniformly sampled multichannel time series. Row i of `samples()` is taken
/// at time t0 + (offset + i) * dt, where `offset` is nonzero only for slices.
class Trajectory {
public:
    Trajectory(double t0, double dt, std::vector<std::string> channels, Eigen::MatrixXd samples,
               std::size_t offset = 0);

    double t0() const noexcept { return t0_; }
    double dt() const noexcept { return dt_; }
    std::size_t offset() const noexcept { return offset_; }
    std::size_t num_steps() const noexcept { return static_cast<std::size_t>(samples_.rows()); }
    std::size_t num_channels() const noexcept { return channels_.size(); }
    const std::vector<std::string>& channels() const noexcept { return channels_; }
    const Eigen::MatrixXd& samples() const noexcept { return samples_; }

    double time(std::size_t i) const noexcept {
        return t0_ + static_cast<double>(offset_ + i) * dt_;
    }

    /// Index of the first sample with time >= t (clamped to num_steps()).
    std::size_t first_index_at_or_after(double t) const noexcept;
    /// Index one past the last sample with time <= t (clamped to num_steps()).
    std::size_t end_index_at_or_before(double t) const noexcept;

    /// Rows [begin, end); keeps the original time grid.
    Trajectory slice(std::size_t begin, std::size_t end) const;
    /// Columns named by `names`, in that order.
    Trajectory select(const std::vector<std::string>& names) const;

    std::size_t channel_index(const std::string& name) const;

    bool operator==(const Trajectory& other) const;

private:
    double t0_;
    double dt_;
    std::vector<std::string> channels_;
    Eigen::MatrixXd samples_;
    std::size_t offset_;
};

StateVec3 rossler_deriv(const StateVec3& s, const RosslerParams& p) noexcept;

/// One classical RK4 step for any state type closed under + and scalar *.
template <class State, class Deriv>
State rk4_step(Deriv&& f, const State& s, double dt) {
    const State k1 = f(s);
    const State k2 = f(s + (0.5 * dt) * k1);
    const State k3 = f(s + (0.5 * dt) * k2);
    const State k4 = f(s + dt * k3);
    return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// RK4 step of the Rössler flow. Throws DivergenceError on a non-finite result.
StateVec3 rk4_step(const StateVec3& s, const RosslerParams& p, double dt);

/// Any component beyond this magnitude aborts integration.
inline constexpr double kDivergenceBound = 1e6;

/// Samples at t = 0, dt, ..., k*dt with k = floor(t_end / dt).
/// Channels are (x, y, z).
Trajectory generate_trajectory(const RosslerParams& p, const StateVec3& s0, double dt,
                               double t_end);

/// Number of samples generate_trajectory produces for (dt, t_end).
std::size_t grid_size(double dt, double t_end);

} // namespace resobs
