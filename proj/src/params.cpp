#include "hovmerge/params.hpp"

#include "hovmerge/errors.hpp"

#include <sstream>

namespace hovmerge {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0)) {
        std::ostringstream msg;
        msg << "parameter " << name << " must be strictly positive, got " << value;
        throw ValidationError(msg.str());
    }
}

void require_nonnegative(double value, const char* name) {
    if (!(value >= 0.0)) {
        std::ostringstream msg;
        msg << "parameter " << name << " must be nonnegative, got " << value;
        throw ValidationError(msg.str());
    }
}

} // namespace

void ControlParams::validate() const {
    require_positive(alpha, "alpha");
    require_positive(h, "h");
    require_positive(k, "k");
    require_positive(tau, "tau");
    require_positive(D, "D");
    require_positive(d_max, "d_max");
    require_positive(a_max, "a_max");
    require_positive(v_max, "v_max");
    require_positive(L, "L");
    require_positive(x_g_dist, "x_g_dist");
    require_positive(d_prime_max, "d_prime_max");
    require_nonnegative(xi, "xi");
    require_nonnegative(T_v, "T_v");
    if (d_prime_max < d_max) {
        std::ostringstream msg;
        msg << "d_prime_max (" << d_prime_max << ") must not be below d_max (" << d_max << ")";
        throw ValidationError(msg.str());
    }
}

void ControlParams::validate_for_linear_analysis() const {
    validate();
    const double disc = (alpha + k) * (alpha + k) - 4.0 * alpha / h;
    if (disc < 0.0) {
        std::ostringstream msg;
        msg << "(alpha + k)^2 - 4 alpha / h = " << disc
            << " < 0: underdamped regime, closed-form analysis unavailable";
        throw UnderdampedError(msg.str());
    }
}

} // namespace hovmerge
