#pragma once

#include <cstdint>

namespace hovmerge {

enum class Lane { main, ramp };

/// Longitudinal state of one vehicle. Positions are measured along the
/// roadway with the merge-region entrance at x = 0; x increases downstream.
struct VehicleState {
    std::int64_t id = 0;
    double x = 0.0;      ///< front-bumper position, m
    double v = 0.0;      ///< velocity, m/s
    double a = 0.0;      ///< realized (lag-filtered) acceleration, m/s^2
    double a_cmd = 0.0;  ///< commanded desired acceleration, m/s^2
    Lane lane = Lane::main;
    double spawn_time = 0.0;
    double spawn_x = 0.0;

    // role bookkeeping
    bool merged_from_ramp = false;     ///< excluded from the trip-delay average
    bool enhanced_brake_active = false;
    std::int64_t watch_lead_id = -1;   ///< just-merged lead under post-merge supervision, -1 if none
};

} // namespace hovmerge
