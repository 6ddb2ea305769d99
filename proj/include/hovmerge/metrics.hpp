#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hovmerge {

/// Running sums behind the lane-disturbance measures. Acceleration samples
/// are squared and weighted by the time the acceleration actually acted
/// (which can be less than dt when the velocity pins at a bound mid-step).
struct MetricsAccumulator {
    double sum_acc_sq = 0.0;    ///< sum of a^2 dt over positive accelerations, m^2/s^3
    double sum_dec_sq = 0.0;    ///< same over negative accelerations
    double sum_dec_sq_b = 0.0;  ///< portion of sum_dec_sq from directly commanded trailers
    double sum_dec_sq_merged = 0.0;  ///< portion from vehicles that merged from the ramp
    std::int64_t merges = 0;
    std::int64_t failures = 0;
    std::vector<double> delays;            ///< per-vehicle trip delays, s
    std::vector<double> merge_times;       ///< s
    std::vector<double> queue_head_waits;  ///< s
    double measure_start = 0.0;            ///< measurement window, s
    double measure_end = 0.0;

    /// One vehicle's contribution over one step. duration is the active
    /// acceleration time within the step; a zero acceleration contributes to
    /// neither sum.
    void add_accel_sample(double accel, double duration, bool trailing_role,
                          bool merged_role = false);

    /// Sums a batch of full-step samples (duration dt each).
    void accumulate(std::span<const double> accels, double dt);

    void record_merge(double time) { ++merges; merge_times.push_back(time); }
    void record_delay(double delay) { delays.push_back(delay); }
    void record_queue_wait(double wait) { queue_head_waits.push_back(wait); }

    double window() const { return measure_end - measure_start; }
};

/// Finalized per-run measures.
struct Metrics {
    double a_tot = 0.0;          ///< m/s^2
    double d_tot = 0.0;          ///< m/s^2
    double t_ave = 0.0;          ///< s
    double merge_rate = 0.0;     ///< merges/s
    double mean_queue_wait = 0.0;///< s
    std::int64_t merges = 0;
    std::int64_t failures = 0;
    double d_tot_b_share = 0.0;  ///< fraction of sum_dec_sq from trailing-role vehicles
};

/// Normalizes the accumulated sums. With no merges (or an empty window) the
/// rate measures are reported as zero rather than undefined.
Metrics finalize(const MetricsAccumulator& acc);

} // namespace hovmerge
