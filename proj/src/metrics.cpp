#include "hovmerge/metrics.hpp"

#include <cmath>
#include <numeric>

namespace hovmerge {

void MetricsAccumulator::add_accel_sample(double accel, double duration, bool trailing_role,
                                          bool merged_role) {
    if (duration <= 0.0 || accel == 0.0) return;
    const double contrib = accel * accel * duration;
    if (accel > 0.0) {
        sum_acc_sq += contrib;
    } else {
        sum_dec_sq += contrib;
        if (trailing_role) sum_dec_sq_b += contrib;
        if (merged_role) sum_dec_sq_merged += contrib;
    }
}

void MetricsAccumulator::accumulate(std::span<const double> accels, double dt) {
    for (const double a : accels) add_accel_sample(a, dt, false);
}

namespace {

double mean_of(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0)
           / static_cast<double>(values.size());
}

} // namespace

Metrics finalize(const MetricsAccumulator& acc) {
    Metrics m;
    m.merges = acc.merges;
    m.failures = acc.failures;
    m.t_ave = mean_of(acc.delays);
    m.mean_queue_wait = mean_of(acc.queue_head_waits);

    const double window = acc.window();
    if (acc.merges > 0 && window > 0.0) {
        const double norm = static_cast<double>(acc.merges) * window;
        m.a_tot = std::sqrt(acc.sum_acc_sq / norm);
        m.d_tot = std::sqrt(acc.sum_dec_sq / norm);
        m.merge_rate = static_cast<double>(acc.merges) / window;
    }
    if (acc.sum_dec_sq > 0.0) {
        m.d_tot_b_share = acc.sum_dec_sq_b / acc.sum_dec_sq;
    }
    return m;
}

} // namespace hovmerge
