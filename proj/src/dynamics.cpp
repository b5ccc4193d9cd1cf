#include "resobs/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "resobs/errors.hpp"

namespace resobs {

namespace {

// Tolerance for snapping t/dt onto the integer grid; absorbs representation
// error of decimal time steps such as 0.1.
constexpr double kGridSnap = 1e-9;

} // namespace

void RosslerParams::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
        throw ParameterError("Rossler parameters must be finite");
    }
}

bool StateVec3::is_finite() const noexcept {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

double StateVec3::max_abs() const noexcept {
    return std::max({std::abs(x), std::abs(y), std::abs(z)});
}

Trajectory::Trajectory(double t0, double dt, std::vector<std::string> channels,
                       Eigen::MatrixXd samples, std::size_t offset)
    : t0_(t0), dt_(dt), channels_(std::move(channels)), samples_(std::move(samples)),
      offset_(offset) {
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) {
        throw ParameterError("trajectory time step must be positive and finite");
    }
    if (static_cast<std::size_t>(samples_.cols()) != channels_.size()) {
        throw ParameterError("trajectory has " + std::to_string(samples_.cols()) +
                             " columns but " + std::to_string(channels_.size()) + " channel names");
    }
}

std::size_t Trajectory::first_index_at_or_after(double t) const noexcept {
    const double k = (t - t0_) / dt_ - static_cast<double>(offset_);
    if (k <= 0.0) {
        return 0;
    }
    const auto idx = static_cast<std::size_t>(std::ceil(k - kGridSnap));
    return std::min(idx, num_steps());
}

std::size_t Trajectory::end_index_at_or_before(double t) const noexcept {
    const double k = (t - t0_) / dt_ - static_cast<double>(offset_);
    if (k < -kGridSnap) {
        return 0;
    }
    const auto idx = static_cast<std::size_t>(std::floor(k + kGridSnap)) + 1;
    return std::min(idx, num_steps());
}

Trajectory Trajectory::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > num_steps()) {
        throw ParameterError("trajectory slice [" + std::to_string(begin) + ", " +
                             std::to_string(end) + ") out of range for " +
                             std::to_string(num_steps()) + " samples");
    }
    const auto rows = static_cast<Eigen::Index>(end - begin);
    return Trajectory(t0_, dt_, channels_,
                      samples_.middleRows(static_cast<Eigen::Index>(begin), rows), offset_ + begin);
}

std::size_t Trajectory::channel_index(const std::string& name) const {
    auto it = std::find(channels_.begin(), channels_.end(), name);
    if (it == channels_.end()) {
        throw ParameterError("trajectory has no channel '" + name + "'");
    }
    return static_cast<std::size_t>(it - channels_.begin());
}

Trajectory Trajectory::select(const std::vector<std::string>& names) const {
    Eigen::MatrixXd out(samples_.rows(), static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) =
            samples_.col(static_cast<Eigen::Index>(channel_index(names[j])));
    }
    return Trajectory(t0_, dt_, names, std::move(out), offset_);
}

bool Trajectory::operator==(const Trajectory& other) const {
    return t0_ == other.t0_ && dt_ == other.dt_ && offset_ == other.offset_ &&
           channels_ == other.channels_ && samples_.rows() == other.samples_.rows() &&
           samples_.cols() == other.samples_.cols() && samples_ == other.samples_;
}

StateVec3 rossler_deriv(const StateVec3& s, const RosslerParams& p) noexcept {
    return {-s.y - s.z, s.x + p.a * s.y, p.b + s.z * (s.x - p.c)};
}

StateVec3 rk4_step(const StateVec3& s, const RosslerParams& p, double dt) {
    const StateVec3 next =
        rk4_step([&p](const StateVec3& v) { return rossler_deriv(v, p); }, s, dt);
    if (!next.is_finite()) {
        throw DivergenceError("RK4 step produced a non-finite state", 0);
    }
    return next;
}

std::size_t grid_size(double dt, double t_end) {
    return static_cast<std::size_t>(std::floor(t_end / dt + kGridSnap)) + 1;
}

Trajectory generate_trajectory(const RosslerParams& p, const StateVec3& s0, double dt,
                               double t_end) {
    p.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ParameterError("dt must be positive and finite");
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw ParameterError("t_end must be positive and finite");
    }
    if (!s0.is_finite()) {
        throw ParameterError("initial state must be finite");
    }

    const std::size_t steps = grid_size(dt, t_end);
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(steps), 3);
    StateVec3 s = s0;
    for (std::size_t i = 0; i < steps; ++i) {
        if (i > 0) {
            s = rk4_step([&p](const StateVec3& v) { return rossler_deriv(v, p); }, s, dt);
            if (!s.is_finite() || s.max_abs() > kDivergenceBound) {
                throw DivergenceError("Rossler integration diverged at step " + std::to_string(i) +
                                          " (t = " + std::to_string(static_cast<double>(i) * dt) +
                                          ")",
                                      i);
            }
        }
        const auto row = static_cast<Eigen::Index>(i);
        samples(row, 0) = s.x;
        samples(row, 1) = s.y;
        samples(row, 2) = s.z;
    }
    return Trajectory(0.0, dt, {"x", "y", "z"}, std::move(samples));
}

} // namespace resobs
