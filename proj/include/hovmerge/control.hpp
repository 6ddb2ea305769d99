#pragma once

#include "hovmerge/params.hpp"
#include "hovmerge/vehicle.hpp"

namespace hovmerge {

/// Desired acceleration of a follower tracking its lead:
///   (alpha/h) * (x_lead - x_f - D - h v_f) + k (v_lead - v_f) - xi a_f.
/// Unclamped; the caller applies clamp_accel.
double desired_accel_follow(const VehicleState& lead, const VehicleState& follower,
                            const ControlParams& p);

/// Same control law expressed on raw kinematic values (spacing is the
/// front-bumper position difference x_lead - x_follower).
double desired_accel(double spacing, double v_follower, double v_lead, double a_follower,
                     const ControlParams& p);

/// Clamp a desired acceleration to [-limit_low, a_max]. limit_low is d_max
/// in normal operation and d_prime_max while enhanced braking is active.
double clamp_accel(double a_desired, double limit_low, const ControlParams& p);

/// Exact discrete solution of tau * da/dt + a = a_cmd over one step with
/// the command held constant: a_cmd + (a - a_cmd) * exp(-dt/tau).
double lag_step(double a, double a_cmd, double tau, double dt);

/// Result of one ballistic position/velocity update.
struct KinematicStep {
    double x;               ///< new position
    double v;               ///< new velocity, clamped to [0, v_max]
    double accel_duration;  ///< time within the step the acceleration actually
                            ///< acted on the motion (the velocity is pinned at a
                            ///< bound for the remainder, where the realized
                            ///< acceleration is zero)
};

/// Advance (x, v) over dt with piecewise-constant acceleration a, handling the
/// instant v reaches 0 or v_max inside the step exactly.
KinematicStep kinematic_step_raw(double x, double v, double a, double dt,
                                 const ControlParams& p);

/// Convenience wrapper updating a VehicleState in place semantics (returns the
/// advanced copy; the lag state s.a is untouched).
VehicleState kinematic_step(VehicleState s, double dt, const ControlParams& p);

} // namespace hovmerge
