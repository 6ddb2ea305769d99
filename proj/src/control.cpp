#include "hovmerge/control.hpp"

#include <algorithm>
#include <cmath>

namespace hovmerge {

double desired_accel(double spacing, double v_follower, double v_lead, double a_follower,
                     const ControlParams& p) {
    return (p.alpha / p.h) * (spacing - p.D - p.h * v_follower)
           + p.k * (v_lead - v_follower) - p.xi * a_follower;
}

double desired_accel_follow(const VehicleState& lead, const VehicleState& follower,
                            const ControlParams& p) {
    return desired_accel(lead.x - follower.x, follower.v, lead.v, follower.a, p);
}

double clamp_accel(double a_desired, double limit_low, const ControlParams& p) {
    return std::clamp(a_desired, -limit_low, p.a_max);
}

double lag_step(double a, double a_cmd, double tau, double dt) {
    return a_cmd + (a - a_cmd) * std::exp(-dt / tau);
}

KinematicStep kinematic_step_raw(double x, double v, double a, double dt,
                                 const ControlParams& p) {
    // Already pinned at a bound with the acceleration pushing past it: cruise.
    if ((v >= p.v_max && a > 0.0) || (v <= 0.0 && a < 0.0)) {
        const double v_pin = v >= p.v_max ? p.v_max : 0.0;
        return {x + v_pin * dt, v_pin, 0.0};
    }

    const double v_free = v + a * dt;
    if (a > 0.0 && v_free > p.v_max) {
        // accelerate until v_max, then cruise
        const double t_hit = (p.v_max - v) / a;
        const double x_new = x + v * t_hit + 0.5 * a * t_hit * t_hit + p.v_max * (dt - t_hit);
        return {x_new, p.v_max, t_hit};
    }
    if (a < 0.0 && v_free < 0.0) {
        // decelerate to rest inside the step
        const double t_hit = -v / a;
        const double x_new = x + v * t_hit + 0.5 * a * t_hit * t_hit;
        return {x_new, 0.0, t_hit};
    }
    return {x + v * dt + 0.5 * a * dt * dt, v_free, dt};
}

VehicleState kinematic_step(VehicleState s, double dt, const ControlParams& p) {
    const KinematicStep step = kinematic_step_raw(s.x, s.v, s.a, dt, p);
    s.x = step.x;
    s.v = step.v;
    return s;
}

} // namespace hovmerge
