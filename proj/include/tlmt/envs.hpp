#pragma once

// Desk-scale continuous-control environments. Deterministic given seed and
// action sequence; state vectors expose named variables the task formulas
// resolve against.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tlmt/rng.hpp"
#include "tlmt/theory.hpp"

namespace tlmt::envs {

class Env {
  public:
    virtual ~Env() = default;
    virtual const std::vector<std::string>& variable_names() const = 0;
    virtual std::uint32_t action_dim() const = 0;
    virtual theory::VarAssignment reset(std::uint64_t seed) = 0;
    // Components outside [-1, 1] are clamped, never an error.
    virtual theory::VarAssignment step(std::span<const double> action) = 0;
    virtual const theory::VarAssignment& state() const = 0;
};

// ── Parking ─────────────────────────────────────────────────────────────────

// Kinematic bicycle in a [-bound, bound]^2 lot. Semi-implicit Euler:
// velocity, then heading, then position; walls clamp position and zero the
// velocity. Exposed state: x, y, vx, vy, sin_t, cos_t.
struct ParkingParams {
    double dt = 0.1;
    double wheelbase = 0.1;
    double bound = 1.0;
    double max_speed = 0.3;
    double max_accel = 0.5;
    double max_steer = 0.7;  // radians at |steering action| = 1
    double start_x = 0.0;
    double start_y = -0.3;
    double start_radius = 0.02;
    double start_heading = 1.5707963267948966;  // facing +y
};

class ParkingEnv final : public Env {
  public:
    explicit ParkingEnv(ParkingParams params);
    const std::vector<std::string>& variable_names() const override;
    std::uint32_t action_dim() const override { return 2; }
    theory::VarAssignment reset(std::uint64_t seed) override;
    theory::VarAssignment step(std::span<const double> action) override;
    const theory::VarAssignment& state() const override { return state_; }

  private:
    void sync_state();

    ParkingParams params_;
    double x_ = 0, y_ = 0, v_ = 0, theta_ = 0;
    theory::VarAssignment state_;
};

// ── Reacher ─────────────────────────────────────────────────────────────────

// Two-joint arm in the plane: unit-inertia double integrator per joint with
// velocity clamping; hand position by forward kinematics. Exposed state:
// sin_t1, cos_t1, sin_t2, cos_t2, w1, w2, x, y, z (z always 0).
struct ReacherParams {
    double dt = 0.1;
    double l1 = 0.1;
    double l2 = 0.1;
    double max_omega = 2.0;
    double torque_scale = 1.0;
    double start_range = 0.1;  // joint angles uniform in [-r, r]
};

class ReacherEnv final : public Env {
  public:
    explicit ReacherEnv(ReacherParams params);
    const std::vector<std::string>& variable_names() const override;
    std::uint32_t action_dim() const override { return 2; }
    theory::VarAssignment reset(std::uint64_t seed) override;
    theory::VarAssignment step(std::span<const double> action) override;
    const theory::VarAssignment& state() const override { return state_; }

  private:
    void sync_state();

    ReacherParams params_;
    double theta1_ = 0, theta2_ = 0, omega1_ = 0, omega2_ = 0;
    theory::VarAssignment state_;
};

}  // namespace tlmt::envs
