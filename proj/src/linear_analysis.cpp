#include "hovmerge/linear_analysis.hpp"

#include "hovmerge/errors.hpp"

#include <cmath>

namespace hovmerge {

EigenPair eigenvalues(const ControlParams& p) {
    p.validate_for_linear_analysis();
    const double s = p.alpha + p.k;
    const double root = std::sqrt(s * s - 4.0 * p.alpha / p.h);
    return {0.5 * (-s + root), 0.5 * (-s - root)};
}

LinearSpectrum linear_spectrum(const ControlParams& p) {
    const EigenPair eig = eigenvalues(p);
    const double l1 = eig.lambda1;
    const double l2 = eig.lambda2;
    const double theta = std::log(l2 / l1) / (l1 - l2);
    const double factor =
        l1 * l2 / (l1 - l2) * (std::exp(l1 * theta) - std::exp(l2 * theta));
    return {l1, l2, theta, factor, 1.0 / factor};
}

PeakDecel peak_deceleration(double delta_v, const ControlParams& p) {
    const LinearSpectrum spec = linear_spectrum(p);
    return {spec.peak_factor * delta_v, spec.theta_peak};
}

double recovery_time(const ControlParams& p) {
    return linear_spectrum(p).t_recover;
}

namespace {

// Unclamped follower behind a lead at constant v_lead. State y = (gap,
// follower velocity, follower acceleration); the acceleration component is
// integrated only when lag > 0, otherwise it is resolved algebraically from
// a = (alpha/h) e + k w - xi a.
struct FollowerOde {
    const ControlParams& p;
    double v_lead;
    double lag;
    double xi;

    double accel_of(const double y[3]) const {
        if (lag > 0.0) return y[2];
        const double e = y[0] - p.D - p.h * y[1];
        return ((p.alpha / p.h) * e + p.k * (v_lead - y[1])) / (1.0 + xi);
    }

    void deriv(const double y[3], double dy[3]) const {
        const double a = accel_of(y);
        dy[0] = v_lead - y[1];
        dy[1] = a;
        if (lag > 0.0) {
            const double e = y[0] - p.D - p.h * y[1];
            const double desired = (p.alpha / p.h) * e + p.k * (v_lead - y[1]) - xi * y[2];
            dy[2] = (desired - y[2]) / lag;
        } else {
            dy[2] = 0.0;
        }
    }
};

} // namespace

LinearResponse linear_response_oracle(double delta_v, const ControlParams& p, double dt,
                                      double duration, double tau, double xi) {
    if (!(dt > 0.0) || !(duration > 0.0)) {
        throw ValidationError("linear_response_oracle requires dt > 0 and duration > 0");
    }
    const double v_lead = p.v_max - delta_v;
    const FollowerOde ode{p, v_lead, tau, xi};

    // The response is measured from the instant the follower's commanded
    // acceleration crosses zero: gap = D + h v_max + (h k / alpha) delta_v.
    // From there the linear system produces the closed-form peak.
    double y[3] = {p.D + p.h * p.v_max + (p.h * p.k / p.alpha) * delta_v, p.v_max, 0.0};

    LinearResponse out;
    out.dt = dt;
    const auto steps = static_cast<std::size_t>(std::ceil(duration / dt));
    out.accel.reserve(steps + 1);
    out.accel.push_back(ode.accel_of(y));
    out.min_accel = out.accel.front();
    out.t_min_accel = 0.0;

    double k1[3], k2[3], k3[3], k4[3], tmp[3];
    for (std::size_t i = 0; i < steps; ++i) {
        ode.deriv(y, k1);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * dt * k1[j];
        ode.deriv(tmp, k2);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + 0.5 * dt * k2[j];
        ode.deriv(tmp, k3);
        for (int j = 0; j < 3; ++j) tmp[j] = y[j] + dt * k3[j];
        ode.deriv(tmp, k4);
        for (int j = 0; j < 3; ++j) {
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        const double a = ode.accel_of(y);
        out.accel.push_back(a);
        if (a < out.min_accel) {
            out.min_accel = a;
            out.t_min_accel = static_cast<double>(i + 1) * dt;
        }
    }
    return out;
}

} // namespace hovmerge
