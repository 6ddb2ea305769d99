#pragma once

#include "hovmerge/params.hpp"

#include <vector>

namespace hovmerge {

/// Closed-form spectrum of the linearized two-vehicle system and the derived
/// peak-response quantities. lambda1 takes the + branch of the root pair, so
/// lambda2 < lambda1 < 0 for any overdamped stable parameter set.
struct LinearSpectrum {
    double lambda1;
    double lambda2;
    double theta_peak;   ///< time of peak deceleration, s
    double peak_factor;  ///< peak deceleration per unit velocity contrast, 1/s
    double t_recover;    ///< recovery time constant, s (reciprocal of peak_factor)
};

/// Roots of s^2 + (alpha + k) s + alpha/h. Throws UnderdampedError when the
/// discriminant is negative.
struct EigenPair {
    double lambda1;
    double lambda2;
};

EigenPair eigenvalues(const ControlParams& p);

LinearSpectrum linear_spectrum(const ControlParams& p);

/// Peak deceleration of a follower at velocity contrast delta_v behind a
/// constant-speed lead, with the time at which it occurs. Lag-free,
/// unclamped closed form.
struct PeakDecel {
    double decel;       ///< magnitude, m/s^2
    double theta_peak;  ///< s
};

PeakDecel peak_deceleration(double delta_v, const ControlParams& p);

/// Reciprocal of the peak factor; the velocity-band width used by the
/// enhanced-braking release rule is d_prime_max * recovery_time.
double recovery_time(const ControlParams& p);

/// Numerical oracle: integrates the unclamped follower response (optionally
/// with actuator lag tau > 0; tau = 0 and xi = 0 reproduce the closed-form
/// assumptions) behind a lead moving at constant speed v_max - delta_v,
/// starting from the follower's own equilibrium spacing at v_max. Returns the
/// acceleration samples at every dt. RK4 on the 2- or 3-state system.
struct LinearResponse {
    std::vector<double> accel;  ///< follower acceleration at t = i * dt
    double dt;
    double min_accel;    ///< most negative sample
    double t_min_accel;  ///< time of that sample, s
};

LinearResponse linear_response_oracle(double delta_v, const ControlParams& p, double dt,
                                      double duration = 10.0, double tau = 0.0,
                                      double xi = 0.0);

} // namespace hovmerge
