#include "tlmt/envs.hpp"

#include <algorithm>
#include <cmath>

namespace tlmt::envs {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

double clamp_action(double a) { return clamp(a, -1.0, 1.0); }

}  // namespace

// ── ParkingEnv ──────────────────────────────────────────────────────────────

ParkingEnv::ParkingEnv(ParkingParams params) : params_(params) {
    state_.resize(6, 0.0);
    reset(0);
}

const std::vector<std::string>& ParkingEnv::variable_names() const {
    static const std::vector<std::string> names = {"x", "y", "vx", "vy", "sin_t", "cos_t"};
    return names;
}

theory::VarAssignment ParkingEnv::reset(std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x7a5cu));
    double angle = uniform(rng, 0.0, 2.0 * M_PI);
    double radius = params_.start_radius * std::sqrt(uniform01(rng));
    x_ = params_.start_x + radius * std::cos(angle);
    y_ = params_.start_y + radius * std::sin(angle);
    v_ = 0.0;
    theta_ = params_.start_heading;
    sync_state();
    return state_;
}

theory::VarAssignment ParkingEnv::step(std::span<const double> action) {
    double throttle = action.size() > 0 ? clamp_action(action[0]) : 0.0;
    double steering = action.size() > 1 ? clamp_action(action[1]) : 0.0;

    v_ = clamp(v_ + throttle * params_.max_accel * params_.dt, -params_.max_speed,
               params_.max_speed);
    theta_ += (v_ / params_.wheelbase) * std::tan(steering * params_.max_steer) * params_.dt;
    // keep theta in (-pi, pi] so trig stays well-conditioned on long runs
    theta_ = std::remainder(theta_, 2.0 * M_PI);
    double nx = x_ + v_ * std::cos(theta_) * params_.dt;
    double ny = y_ + v_ * std::sin(theta_) * params_.dt;
    bool hit_wall = nx < -params_.bound || nx > params_.bound || ny < -params_.bound ||
                    ny > params_.bound;
    x_ = clamp(nx, -params_.bound, params_.bound);
    y_ = clamp(ny, -params_.bound, params_.bound);
    if (hit_wall) v_ = 0.0;
    sync_state();
    return state_;
}

void ParkingEnv::sync_state() {
    state_[0] = x_;
    state_[1] = y_;
    state_[2] = v_ * std::cos(theta_);
    state_[3] = v_ * std::sin(theta_);
    state_[4] = std::sin(theta_);
    state_[5] = std::cos(theta_);
}

// ── ReacherEnv ──────────────────────────────────────────────────────────────

ReacherEnv::ReacherEnv(ReacherParams params) : params_(params) {
    state_.resize(9, 0.0);
    reset(0);
}

const std::vector<std::string>& ReacherEnv::variable_names() const {
    static const std::vector<std::string> names = {"sin_t1", "cos_t1", "sin_t2", "cos_t2",
                                                   "w1",     "w2",     "x",      "y",
                                                   "z"};
    return names;
}

theory::VarAssignment ReacherEnv::reset(std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x4ea3u));
    theta1_ = uniform(rng, -params_.start_range, params_.start_range);
    theta2_ = uniform(rng, -params_.start_range, params_.start_range);
    omega1_ = 0.0;
    omega2_ = 0.0;
    sync_state();
    return state_;
}

theory::VarAssignment ReacherEnv::step(std::span<const double> action) {
    double t1 = action.size() > 0 ? clamp_action(action[0]) : 0.0;
    double t2 = action.size() > 1 ? clamp_action(action[1]) : 0.0;
    omega1_ = clamp(omega1_ + t1 * params_.torque_scale * params_.dt, -params_.max_omega,
                    params_.max_omega);
    omega2_ = clamp(omega2_ + t2 * params_.torque_scale * params_.dt, -params_.max_omega,
                    params_.max_omega);
    theta1_ = std::remainder(theta1_ + omega1_ * params_.dt, 2.0 * M_PI);
    theta2_ = std::remainder(theta2_ + omega2_ * params_.dt, 2.0 * M_PI);
    sync_state();
    return state_;
}

void ReacherEnv::sync_state() {
    state_[0] = std::sin(theta1_);
    state_[1] = std::cos(theta1_);
    state_[2] = std::sin(theta2_);
    state_[3] = std::cos(theta2_);
    state_[4] = omega1_;
    state_[5] = omega2_;
    state_[6] = params_.l1 * std::cos(theta1_) + params_.l2 * std::cos(theta1_ + theta2_);
    state_[7] = params_.l1 * std::sin(theta1_) + params_.l2 * std::sin(theta1_ + theta2_);
    state_[8] = 0.0;
}

}  // namespace tlmt::envs
