#include "hovmerge/merge.hpp"

#include "hovmerge/control.hpp"
#include "hovmerge/linear_analysis.hpp"

#include <algorithm>
#include <cmath>

namespace hovmerge {

const char* to_string(MergePhase phase) {
    switch (phase) {
        case MergePhase::queued: return "queued";
        case MergePhase::released: return "released";
        case MergePhase::in_region_unverified: return "in_region_unverified";
        case MergePhase::in_region_verified: return "in_region_verified";
        case MergePhase::merged: return "merged";
        case MergePhase::failed: return "failed";
    }
    return "?";
}

MergeScores score_gap(const VehicleState& m, const VehicleState& a, const VehicleState& b,
                      const ControlParams& p) {
    const double s_a = a.x - m.x - p.D - p.h * m.v + p.T_v * (a.v - m.v);
    const double s_b = m.x - b.x - p.D - p.h * b.v + p.T_v * (m.v - b.v);
    return {s_a, s_b};
}

bool candidate_gap(const VehicleState& a, const VehicleState& b, const ControlParams& p) {
    return b.x < 0.0 && a.x >= b.x + 2.0 * (p.h * b.v + p.D);
}

double merge_time_estimate(const ControlParams& p) {
    return std::sqrt(2.0 * p.x_g_dist / p.a_max);
}

double release_velocity(const ControlParams& p) {
    return p.a_max * merge_time_estimate(p);
}

ReleaseEstimate estimate_release(const VehicleState& a, const VehicleState& b,
                                 const ControlParams& p) {
    const double t_m = merge_time_estimate(p);
    return {-a.x / a.v, -b.x / b.v, t_m, p.a_max * t_m};
}

bool release_check(const VehicleState& a, const VehicleState& b, const ControlParams& p) {
    if (a.v <= 0.0 || b.v <= 0.0) return false;  // gap not approaching
    const ReleaseEstimate est = estimate_release(a, b, p);
    if (!(est.T_a < est.T_m && est.T_m < est.T_b)) return false;
    const double lower = est.T_a + p.D / a.v + (p.h + p.T_v) * est.v_m0 / a.v - p.T_v;
    const double upper = est.T_b - p.D / b.v - p.h - p.T_v + p.T_v * est.v_m0 / b.v;
    return est.T_m > lower && est.T_m < upper;
}

double ramp_accel(const VehicleState& m, double v_m0, const ControlParams& p) {
    return std::min(p.k * (v_m0 - m.v), p.a_max);
}

bool gap_verified(const VehicleState& m, const VehicleState& a, const VehicleState& b,
                  const ControlParams& p) {
    const double bumper_gap = a.x - b.x - p.D;
    return bumper_gap >= 2.0 * p.h * p.v_max + p.D && b.x < m.x && m.x < a.x;
}

double realign_accel_to_lead(const VehicleState& m, const VehicleState& a,
                             const ControlParams& p, bool include_d) {
    const double d_term = include_d ? p.D : 0.0;
    return (p.alpha / p.h) * (a.x - m.x - d_term - p.h * m.v) + p.k * (a.v - m.v);
}

double realign_accel_to_trail(const VehicleState& m, const VehicleState& b,
                              const ControlParams& p, bool include_d) {
    const double d_term = include_d ? p.D : 0.0;
    return -((p.alpha / p.h) * (m.x - b.x - d_term - p.h * b.v) + p.k * (m.v - b.v));
}

RegionCommand region_control(const VehicleState& m, const VehicleState& a,
                             const VehicleState& b, MergePhase phase, bool past_midpoint,
                             const ControlParams& p, bool include_d_in_realign) {
    const MergeScores scores = score_gap(m, a, b, p);
    RegionCommand cmd{0.0, MergerLaw::follow_lead, std::nullopt};

    if (past_midpoint && (scores.S_a < 0.0 || scores.S_b < 0.0)) {
        if (scores.S_a < 0.0) {
            cmd.a_m_cmd = -0.5 * p.d_max;
            cmd.law = MergerLaw::brake_half;
        }
        if (scores.S_b < 0.0) {
            // takes precedence for m when both margins are negative
            cmd.a_m_cmd = 0.0;
            cmd.law = MergerLaw::hold_zero;
            cmd.a_b_cmd = -p.d_max;
        }
        return cmd;
    }

    if (phase == MergePhase::in_region_verified) {
        cmd.a_m_cmd = clamp_accel(desired_accel_follow(a, m, p), p.d_max, p);
        if (scores.S_b < 0.0) {
            cmd.a_b_cmd = -p.d_max;
        }
        return cmd;
    }

    // unverified gap: realign toward whichever margin is violated
    if (scores.S_a < 0.0 && scores.S_b > 0.0) {
        const double realign = realign_accel_to_lead(m, a, p, include_d_in_realign);
        cmd.a_m_cmd = clamp_accel(realign - p.xi * m.a, p.d_max, p);
        cmd.law = MergerLaw::realign_to_lead;
    } else if (scores.S_a > 0.0 && scores.S_b < 0.0) {
        const double realign = realign_accel_to_trail(m, b, p, include_d_in_realign);
        cmd.a_m_cmd = clamp_accel(realign - p.xi * m.a, p.d_max, p);
        cmd.law = MergerLaw::realign_to_trail;
    } else {
        // both margins on the same side of zero: no dispatch rule applies and
        // the vehicle keeps following a with the standard clamped law
        cmd.a_m_cmd = clamp_accel(desired_accel_follow(a, m, p), p.d_max, p);
    }
    return cmd;
}

bool merge_allowed(const MergeScores& scores, double lead_bumper_gap) {
    return scores.S_a >= 0.0 && scores.S_b >= 0.0 && lead_bumper_gap >= min_lead_gap;
}

EnhancedBrakeCommand enhanced_brake_controller(const VehicleState& b, const VehicleState& m,
                                               const ControlParams& p) {
    const double spacing_term = m.x - b.x - p.D - p.h * b.v;
    const double dv = m.v - b.v;

    if (!b.enhanced_brake_active) {
        const double trigger = spacing_term + (p.h * p.k / p.alpha) * dv;
        if (trigger < 0.0) {
            return {true, -p.d_prime_max};
        }
        return {false, std::nullopt};
    }

    // Release once the ordinary following command is gentler than the
    // enhanced level and the remaining velocity contrast is inside the
    // recovery band. A contrast that has already resolved (v_b <= v_m)
    // also releases: the lead is pulling away and the normal law suffices.
    if (b.v <= m.v) {
        return {false, std::nullopt};
    }
    const double follow_cmd = (p.alpha / p.h) * spacing_term + p.k * dv;
    const double band = p.d_prime_max * recovery_time(p);
    if (follow_cmd > -p.d_prime_max && b.v < m.v + band) {
        return {false, std::nullopt};
    }
    return {true, -p.d_prime_max};
}

} // namespace hovmerge
