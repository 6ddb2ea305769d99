#include <doctest.h>

#include "hovmerge/errors.hpp"
#include "hovmerge/params.hpp"
#include "hovmerge/rng.hpp"
#include "hovmerge/traffic_gen.hpp"

#include <cmath>
#include <vector>

using namespace hovmerge;

TEST_CASE("platoon size mapping") {
    CHECK(platoon_size_from_unit(0.0, 6) == 3);       // Int(1) = 1, clamped to 2 gaps
    CHECK(platoon_size_from_unit(0.999, 6) == 7);     // Int(6.994) = 6 gaps
    CHECK(platoon_size_from_unit(0.5, 6) == 5);       // Int(4) = 4 gaps
    for (double r : {0.0, 0.3, 0.7, 0.999}) {
        CHECK(platoon_size_from_unit(r, 2) == 3);     // clamp dominates at N_plat = 2
    }
}

TEST_CASE("platoon separation mapping") {
    const ControlParams p;  // h v_max + D = 45.5
    CHECK(separation_from_unit(0.0, 5, p) == doctest::Approx(45.5));
    CHECK(separation_from_unit(1.0 - 1e-12, 5, p) == doctest::Approx(227.5).epsilon(1e-9));
    for (double r : {0.0, 0.5, 0.999}) {
        CHECK(separation_from_unit(r, 1, p) == doctest::Approx(45.5));
    }
}

TEST_CASE("analytic mean flow") {
    const ControlParams p;
    const MeanFlow f = mean_flow(6, 5, p);
    CHECK(f.mean_n_gap == doctest::Approx(3.5 + 1.0 / 6.0).epsilon(1e-14));
    CHECK(f.mean_l_sep == doctest::Approx(2.6 * 45.5).epsilon(1e-14));
    CHECK(f.flow * 3600.0 == doctest::Approx(2239.0).epsilon(1e-3));
    CHECK(f.flow == doctest::Approx(0.61).epsilon(0.03));
    const double max_flow = p.v_max / (p.h * p.v_max + p.D);
    CHECK(max_flow * 3600.0 == doctest::Approx(3007.0).epsilon(1e-3));
}

TEST_CASE("empirical draws match the exact distribution") {
    const ControlParams p;
    const int n_plat = 6;
    const int draws = 100000;
    SplitMix64 rng(42);

    std::vector<int> counts(n_plat + 1, 0);
    double sum_gaps = 0.0;
    for (int i = 0; i < draws; ++i) {
        const int n_gap = sample_platoon_size(rng, n_plat) - 1;
        REQUIRE(n_gap >= 2);
        REQUIRE(n_gap <= n_plat);
        ++counts[n_gap];
        sum_gaps += n_gap;
    }
    // P(2) = 2/N, P(j) = 1/N for 3 <= j <= N; allow 3 sigma multinomial bounds
    for (int j = 2; j <= n_plat; ++j) {
        const double prob = (j == 2 ? 2.0 : 1.0) / n_plat;
        const double sigma = std::sqrt(draws * prob * (1.0 - prob));
        CHECK(std::abs(counts[j] - draws * prob) < 3.0 * sigma);
    }
    const double mean_gap = sum_gaps / draws;
    CHECK(mean_gap == doctest::Approx((n_plat + 1) / 2.0 + 1.0 / n_plat).epsilon(0.01));

    SplitMix64 rng2(43);
    double sum_sep = 0.0;
    for (int i = 0; i < draws; ++i) {
        sum_sep += sample_separation(rng2, 5, p);
    }
    CHECK(sum_sep / draws == doctest::Approx(mean_flow(n_plat, 5, p).mean_l_sep).epsilon(0.01));
}

TEST_CASE("platoon stream") {
    const ControlParams p;
    TrafficGenConfig cfg;
    cfg.seed = 99;

    SUBCASE("identical seeds give identical streams") {
        PlatoonStream s1(cfg, p);
        PlatoonStream s2(cfg, p);
        for (int i = 0; i < 1000; ++i) {
            CHECK(s1.take_spacing() == s2.take_spacing());
        }
    }
    SUBCASE("first vehicle enters immediately, later spacings are physical") {
        PlatoonStream s(cfg, p);
        CHECK(s.take_spacing() == 0.0);
        const double unit = p.h * p.v_max + p.D;
        for (int i = 0; i < 5000; ++i) {
            const double spacing = s.take_spacing();
            CHECK(spacing >= unit - 1e-12);
            CHECK(spacing <= 5.0 * unit + 1e-12);
        }
    }
    SUBCASE("stream matches an independent replay of the draw discipline") {
        // one size draw per platoon, then one separation draw per boundary,
        // realized as (n-1) equilibrium spacings followed by the separation
        PlatoonStream s(cfg, p);
        SplitMix64 replay(cfg.seed);
        const double unit = p.h * p.v_max + p.D;
        int vehicles_left = platoon_size_from_unit(replay.next_unit(), cfg.n_plat);
        CHECK(s.take_spacing() == 0.0);
        --vehicles_left;
        for (int i = 0; i < 5000; ++i) {
            double expected;
            if (vehicles_left > 0) {
                expected = unit;
            } else {
                vehicles_left = platoon_size_from_unit(replay.next_unit(), cfg.n_plat);
                expected = separation_from_unit(replay.next_unit(), cfg.l_plat, p);
            }
            CHECK(s.take_spacing() == expected);
            --vehicles_left;
        }
    }
    SUBCASE("config invariants are enforced") {
        TrafficGenConfig bad = cfg;
        bad.n_plat = 1;
        CHECK_THROWS_AS(PlatoonStream(bad, p), ValidationError);
        bad = cfg;
        bad.l_plat = 0;
        CHECK_THROWS_AS(PlatoonStream(bad, p), ValidationError);
    }
}