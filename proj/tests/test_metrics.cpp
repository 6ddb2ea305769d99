#include <doctest.h>

#include "hovmerge/metrics.hpp"

#include <array>
#include <cmath>

using namespace hovmerge;

TEST_CASE("accumulation splits by the sign of the acceleration") {
    MetricsAccumulator acc;

    SUBCASE("cruising vehicles contribute nothing") {
        const std::array<double, 3> accels = {0.0, 0.0, 0.0};
        acc.accumulate(accels, 0.1);
        CHECK(acc.sum_acc_sq == 0.0);
        CHECK(acc.sum_dec_sq == 0.0);
    }
    SUBCASE("one accelerating vehicle") {
        const std::array<double, 1> accels = {3.0};
        acc.accumulate(accels, 0.1);
        CHECK(acc.sum_acc_sq == doctest::Approx(0.9).epsilon(1e-14));
        CHECK(acc.sum_dec_sq == 0.0);
    }
    SUBCASE("one decelerating vehicle") {
        const std::array<double, 1> accels = {-2.0};
        acc.accumulate(accels, 0.1);
        CHECK(acc.sum_dec_sq == doctest::Approx(0.4).epsilon(1e-14));
        CHECK(acc.sum_acc_sq == 0.0);
    }
    SUBCASE("trailing-role attribution") {
        acc.add_accel_sample(-2.0, 0.1, true);
        acc.add_accel_sample(-1.0, 0.1, false);
        CHECK(acc.sum_dec_sq == doctest::Approx(0.5));
        CHECK(acc.sum_dec_sq_b == doctest::Approx(0.4));
    }
}

TEST_CASE("finalization") {
    SUBCASE("single merge normalization") {
        MetricsAccumulator acc;
        acc.sum_acc_sq = 30.0;  // a_max^2 * (v_max - v_m)/a_max at the baseline
        acc.merges = 1;
        acc.measure_start = 0.0;
        acc.measure_end = 2e4;
        const Metrics m = finalize(acc);
        CHECK(m.a_tot == doctest::Approx(std::sqrt(30.0 / 2e4)).epsilon(1e-14));
        CHECK(m.a_tot == doctest::Approx(0.0387).epsilon(1e-3));
        CHECK(m.merge_rate * acc.window() == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("no events reports zeros") {
        MetricsAccumulator acc;
        acc.measure_start = 0.0;
        acc.measure_end = 100.0;
        const Metrics m = finalize(acc);
        CHECK(m.a_tot == 0.0);
        CHECK(m.d_tot == 0.0);
        CHECK(m.t_ave == 0.0);
        CHECK(m.merge_rate == 0.0);
        CHECK(m.mean_queue_wait == 0.0);
    }
    SUBCASE("a_tot is a per-merge ratio at a fixed window") {
        MetricsAccumulator one;
        one.sum_acc_sq = 12.0;
        one.merges = 4;
        one.measure_end = 500.0;
        // doubled disturbance with doubled merges over the same window
        MetricsAccumulator busier = one;
        busier.sum_acc_sq = 24.0;
        busier.merges = 8;
        CHECK(finalize(busier).a_tot == doctest::Approx(finalize(one).a_tot).epsilon(1e-12));
        // doubling the window as well divides the measure by sqrt(2):
        // the normalization is per merge AND per unit time
        MetricsAccumulator longer = busier;
        longer.measure_end = 1000.0;
        CHECK(finalize(longer).a_tot
              == doctest::Approx(finalize(one).a_tot / std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("delays and waits average") {
        MetricsAccumulator acc;
        acc.record_delay(0.1);
        acc.record_delay(0.3);
        acc.record_queue_wait(4.0);
        acc.record_queue_wait(8.0);
        const Metrics m = finalize(acc);
        CHECK(m.t_ave == doctest::Approx(0.2).epsilon(1e-14));
        CHECK(m.mean_queue_wait == doctest::Approx(6.0).epsilon(1e-14));
    }
}

TEST_CASE("sums are exact Riemann sums, invariant under dt refinement") {
    // piecewise-constant profile: +3 for 2 s, 0 for 1 s, -2 for 3 s
    auto accumulate_profile = [](double dt) {
        MetricsAccumulator acc;
        const int n = static_cast<int>(std::llround(6.0 / dt));
        for (int i = 0; i < n; ++i) {
            const double t = i * dt;
            const double a = t < 2.0 ? 3.0 : (t < 3.0 ? 0.0 : -2.0);
            acc.add_accel_sample(a, dt, false);
        }
        return acc;
    };
    const MetricsAccumulator coarse = accumulate_profile(0.1);
    const MetricsAccumulator fine = accumulate_profile(0.001);
    CHECK(coarse.sum_acc_sq == doctest::Approx(18.0).epsilon(1e-12));
    CHECK(coarse.sum_dec_sq == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(fine.sum_acc_sq == doctest::Approx(coarse.sum_acc_sq).epsilon(1e-9));
    CHECK(fine.sum_dec_sq == doctest::Approx(coarse.sum_dec_sq).epsilon(1e-9));
}