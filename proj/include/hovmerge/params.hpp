#pragma once

namespace hovmerge {

/// Controller and vehicle constants shared by every vehicle in the lane.
/// Defaults are the baseline parameter set used throughout the experiments.
struct ControlParams {
    double alpha = 2.0;        ///< spacing sensitivity, 1/s
    double h = 1.0;            ///< headway time, s
    double k = 1.0;            ///< relative-velocity gain, 1/s
    double xi = 0.6;           ///< acceleration-feedback gain, dimensionless
    double tau = 0.5;          ///< mechanical response time, s
    double D = 7.5;            ///< vehicle length plus safety margin, m
    double d_max = 2.0;        ///< maximum service deceleration, m/s^2
    double a_max = 3.0;        ///< maximum acceleration, m/s^2
    double v_max = 38.0;       ///< lane maximum speed, m/s
    double L = 500.0;          ///< merge-region length, m
    double x_g_dist = 150.0;   ///< hold-point distance upstream of the region entrance, m
    double T_v = 2.5;          ///< velocity-difference weight in merge scoring, s
    double d_prime_max = 3.0;  ///< enhanced braking level (1.5 * d_max by default), m/s^2

    /// Equilibrium front-bumper-to-front-bumper spacing at speed v.
    double spacing_eq(double v) const { return D + h * v; }

    /// Position of the ramp hold point (region entrance is x = 0).
    double hold_point() const { return -x_g_dist; }

    /// Throws ValidationError if any basic invariant is violated.
    void validate() const;

    /// validate() plus the real-eigenvalue requirement
    /// (alpha + k)^2 >= 4 alpha / h needed by the closed-form analysis.
    void validate_for_linear_analysis() const;
};

} // namespace hovmerge
