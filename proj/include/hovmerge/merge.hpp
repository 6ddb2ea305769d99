#pragma once

#include "hovmerge/params.hpp"
#include "hovmerge/vehicle.hpp"

#include <optional>

namespace hovmerge {

/// Minimum front-bumper-to-front-bumper clearance (minus D) to the lead
/// vehicle required at the merge instant, m.
inline constexpr double min_lead_gap = 10.0;

/// Merge-scoring margins of the merging vehicle m with respect to the lead
/// vehicle a and the trailing vehicle b. A merge requires both >= 0.
struct MergeScores {
    double S_a;
    double S_b;
};

/// Arrival-time estimates used by the release rule. T_a/T_b are the times for
/// a and b to reach the region entrance at constant speed; T_m is the fixed
/// travel time of the ramp vehicle from the hold point at full acceleration,
/// and v_m0 its expected entrance velocity.
struct ReleaseEstimate {
    double T_a;
    double T_b;
    double T_m;
    double v_m0;
};

/// Lifecycle of a ramp vehicle. past_midpoint is tracked separately and
/// latches once the vehicle crosses L/2.
enum class MergePhase {
    queued,
    released,
    in_region_unverified,
    in_region_verified,
    merged,
    failed,
};

const char* to_string(MergePhase phase);

MergeScores score_gap(const VehicleState& m, const VehicleState& a, const VehicleState& b,
                      const ControlParams& p);

/// True iff the consecutive main-lane pair (a ahead of b) frames a gap worth
/// considering: b still upstream of the entrance and spacing at least
/// 2 (h v_b + D).
bool candidate_gap(const VehicleState& a, const VehicleState& b, const ControlParams& p);

/// T_m = sqrt(2 x_g_dist / a_max): hold-point-to-entrance travel time from
/// rest at full acceleration.
double merge_time_estimate(const ControlParams& p);

/// v_m0 = a_max * T_m: expected velocity at the entrance.
double release_velocity(const ControlParams& p);

ReleaseEstimate estimate_release(const VehicleState& a, const VehicleState& b,
                                 const ControlParams& p);

/// Release rule: the gap must arrive in the right order (T_a < T_m < T_b) and
/// place the ramp vehicle in approximately merge-ready position on arrival.
/// Returns false when either lane vehicle is stopped (the gap is not
/// approaching, arrival times are undefined).
bool release_check(const VehicleState& a, const VehicleState& b, const ControlParams& p);

/// Speed-tracking command of a released vehicle between the hold point and
/// the entrance: min(k (v_m0 - v_m), a_max).
double ramp_accel(const VehicleState& m, double v_m0, const ControlParams& p);

/// In-region gap verification: bumper gap between a and b at least
/// 2 h v_max + D, with m between them.
bool gap_verified(const VehicleState& m, const VehicleState& a, const VehicleState& b,
                  const ControlParams& p);

/// Control law selected by the in-region dispatch for the merging vehicle.
/// Formula-based laws are re-evaluated against fresh states on every
/// integration step until the next decision tick.
enum class MergerLaw {
    follow_lead,      ///< clamped following of a (also the fallback when no rule fires)
    realign_to_lead,  ///< drop back toward a's margin
    realign_to_trail, ///< pull away from b's margin
    brake_half,       ///< -d_max/2 past the midpoint with the lead margin violated
    hold_zero,        ///< constant speed past the midpoint while b yields
};

/// Re-alignment command toward the lead margin (used when the gap fails
/// verification with S_a < 0): (alpha/h)(x_a - x_m - D - h v_m) + k (v_a - v_m),
/// before acceleration feedback and clamping. include_d = false keeps the
/// literal D-less spacing form for comparison.
double realign_accel_to_lead(const VehicleState& m, const VehicleState& a,
                             const ControlParams& p, bool include_d);

/// Mirror image for the trailing margin (S_b < 0):
/// -[(alpha/h)(x_m - x_b - D - h v_b) + k (v_m - v_b)].
double realign_accel_to_trail(const VehicleState& m, const VehicleState& b,
                              const ControlParams& p, bool include_d);

/// Commands issued by the in-region dispatch. a_m_cmd is the clamped command
/// for the merging vehicle under the selected law; a missing a_b_cmd leaves b
/// under its normal car-following control.
struct RegionCommand {
    double a_m_cmd;
    MergerLaw law;
    std::optional<double> a_b_cmd;
};

/// Per-tick control dispatch for an unmerged vehicle inside the region.
/// phase must be one of the two in-region phases. include_d_in_realign
/// selects whether the re-alignment laws use the same D-offset spacing as the
/// car-following law (default) or the literal D-less form kept for
/// comparison.
RegionCommand region_control(const VehicleState& m, const VehicleState& a,
                             const VehicleState& b, MergePhase phase, bool past_midpoint,
                             const ControlParams& p, bool include_d_in_realign = true);

/// Merge commitment test: both scores nonnegative and at least min_lead_gap
/// of clear road to the lead vehicle. Boundaries inclusive.
bool merge_allowed(const MergeScores& scores, double lead_bumper_gap);

/// Post-merge supervision of the trailing vehicle. Reads the current
/// activation state from b.enhanced_brake_active; when active the returned
/// command is -d_prime_max, otherwise b returns to normal following control.
struct EnhancedBrakeCommand {
    bool active;
    std::optional<double> a_b_cmd;
};

EnhancedBrakeCommand enhanced_brake_controller(const VehicleState& b, const VehicleState& m,
                                               const ControlParams& p);

} // namespace hovmerge
