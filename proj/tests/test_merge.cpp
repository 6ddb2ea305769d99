#include <doctest.h>

#include "hovmerge/control.hpp"
#include "hovmerge/merge.hpp"
#include "hovmerge/params.hpp"
#include "hovmerge/rng.hpp"

#include <cmath>

using namespace hovmerge;

namespace {

VehicleState vehicle(double x, double v, double a = 0.0) {
    VehicleState s;
    s.x = x;
    s.v = v;
    s.a = a;
    return s;
}

} // namespace

TEST_CASE("merge scores") {
    ControlParams p;
    p.T_v = 2.5;

    SUBCASE("equilibrium boundary gives S_a = 0") {
        const VehicleState m = vehicle(0.0, 28.0);
        const VehicleState a = vehicle(p.D + p.h * m.v, 28.0);
        const VehicleState b = vehicle(-100.0, 38.0);
        CHECK(score_gap(m, a, b, p).S_a == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("direct substitution for both margins") {
        // S_a = 50 - 7.5 - 28 + 2.5*10 = 39.5
        // S_b = 40 - 7.5 - 38 + 2.5*(-10) = -30.5
        const VehicleState m = vehicle(0.0, 28.0);
        const VehicleState a = vehicle(50.0, 38.0);
        const VehicleState b = vehicle(-40.0, 38.0);
        const MergeScores s = score_gap(m, a, b, p);
        CHECK(s.S_a == doctest::Approx(39.5));
        CHECK(s.S_b == doctest::Approx(-30.5));
    }
    SUBCASE("T_v = 0 reduces the scores to pure spacing terms") {
        p.T_v = 0.0;
        SplitMix64 rng(3);
        for (int i = 0; i < 200; ++i) {
            const double v_m = 38.0 * rng.next_unit();
            const double v_a = 38.0 * rng.next_unit();
            const double v_b = 38.0 * rng.next_unit();
            const VehicleState m = vehicle(0.0, v_m);
            const VehicleState a = vehicle(20.0 + 80.0 * rng.next_unit(), v_a);
            const VehicleState b = vehicle(-20.0 - 80.0 * rng.next_unit(), v_b);
            const MergeScores s = score_gap(m, a, b, p);
            CHECK(s.S_a == doctest::Approx(a.x - m.x - p.D - p.h * m.v).epsilon(1e-13));
            CHECK(s.S_b == doctest::Approx(m.x - b.x - p.D - p.h * b.v).epsilon(1e-13));
        }
    }
    SUBCASE("verified gaps with both endpoints at v_max have S_a + S_b > 0") {
        SplitMix64 rng(5);
        for (int i = 0; i < 500; ++i) {
            const double gap = 2.0 * p.h * p.v_max + p.D + 60.0 * rng.next_unit();
            const VehicleState b = vehicle(-30.0, p.v_max);
            const VehicleState a = vehicle(b.x + gap + p.D, p.v_max);
            const double v_m = 37.9 * rng.next_unit();
            const VehicleState m =
                vehicle(b.x + p.D + (gap - p.D) * rng.next_unit(), v_m);
            const MergeScores s = score_gap(m, a, b, p);
            CHECK(s.S_a + s.S_b > 0.0);
        }
    }
}

TEST_CASE("gap candidacy") {
    const ControlParams p;
    SUBCASE("wide approaching gap") {
        CHECK(candidate_gap(vehicle(-250.0, 38.0), vehicle(-450.0, 38.0), p));
    }
    SUBCASE("trailer already past the entrance") {
        CHECK_FALSE(candidate_gap(vehicle(300.0, 38.0), vehicle(10.0, 38.0), p));
    }
    SUBCASE("boundary spacing is inclusive") {
        // 2 (h v_b + D) = 91 at defaults
        CHECK(candidate_gap(vehicle(-359.0, 38.0), vehicle(-450.0, 38.0), p));
        CHECK_FALSE(candidate_gap(vehicle(-359.01, 38.0), vehicle(-450.0, 38.0), p));
    }
}

TEST_CASE("release scheduling") {
    const ControlParams p;

    SUBCASE("hold-point travel estimates") {
        CHECK(merge_time_estimate(p) == doctest::Approx(10.0).epsilon(1e-14));
        CHECK(release_velocity(p) == doctest::Approx(30.0).epsilon(1e-14));
    }
    SUBCASE("window example accepts") {
        const VehicleState a = vehicle(-250.0, 38.0);
        const VehicleState b = vehicle(-450.0, 38.0);
        const ReleaseEstimate est = estimate_release(a, b, p);
        CHECK(est.T_a == doctest::Approx(250.0 / 38.0));
        CHECK(est.T_b == doctest::Approx(450.0 / 38.0));
        CHECK(release_check(a, b, p));
    }
    SUBCASE("trailer arriving too soon rejects") {
        const VehicleState a = vehicle(-250.0, 38.0);
        const VehicleState b = vehicle(-420.0, 38.0);
        CHECK_FALSE(release_check(a, b, p));
    }
    SUBCASE("stopped gap endpoints reject") {
        CHECK_FALSE(release_check(vehicle(-250.0, 0.0), vehicle(-450.0, 38.0), p));
        CHECK_FALSE(release_check(vehicle(-250.0, 38.0), vehicle(-450.0, 0.0), p));
    }
}

TEST_CASE("ramp speed tracking") {
    const ControlParams p;
    CHECK(ramp_accel(vehicle(-100.0, 0.0), 30.0, p) == doctest::Approx(3.0));
    CHECK(ramp_accel(vehicle(-100.0, 30.0), 30.0, p) == doctest::Approx(0.0));
    CHECK(ramp_accel(vehicle(-100.0, 29.0), 30.0, p) == doctest::Approx(1.0));
}

TEST_CASE("in-region dispatch") {
    const ControlParams p;

    SUBCASE("verified, margins fine: follow the lead at equilibrium") {
        const VehicleState m = vehicle(10.0, 28.0);
        const VehicleState a = vehicle(10.0 + p.spacing_eq(28.0), 28.0);
        const VehicleState b = vehicle(-80.0, 38.0);
        const RegionCommand cmd =
            region_control(m, a, b, MergePhase::in_region_verified, false, p);
        CHECK(cmd.a_m_cmd == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(cmd.law == MergerLaw::follow_lead);
        CHECK_FALSE(cmd.a_b_cmd.has_value());
    }
    SUBCASE("verified with violated trailer margin commands b to brake") {
        const VehicleState m = vehicle(0.0, 28.0);
        const VehicleState a = vehicle(50.0, 38.0);
        const VehicleState b = vehicle(-40.0, 38.0);  // S_b = -30.5
        const RegionCommand cmd =
            region_control(m, a, b, MergePhase::in_region_verified, false, p);
        REQUIRE(cmd.a_b_cmd.has_value());
        CHECK(*cmd.a_b_cmd == doctest::Approx(-2.0));
    }
    SUBCASE("past midpoint with S_a < 0 brakes at half the service level") {
        const VehicleState m = vehicle(260.0, 38.0);
        const VehicleState a = vehicle(260.0 + p.D + p.h * 38.0 - 5.0, 38.0);  // S_a = -5
        const VehicleState b = vehicle(100.0, 38.0);
        const RegionCommand cmd =
            region_control(m, a, b, MergePhase::in_region_verified, true, p);
        CHECK(cmd.a_m_cmd == doctest::Approx(-1.0));
        CHECK(cmd.law == MergerLaw::brake_half);
    }
    SUBCASE("past midpoint with S_b < 0 holds speed and brakes the trailer") {
        const VehicleState m = vehicle(260.0, 28.0);
        const VehicleState a = vehicle(400.0, 38.0);
        const VehicleState b = vehicle(230.0, 38.0);
        const RegionCommand cmd =
            region_control(m, a, b, MergePhase::in_region_unverified, true, p);
        CHECK(cmd.a_m_cmd == 0.0);
        CHECK(cmd.law == MergerLaw::hold_zero);
        REQUIRE(cmd.a_b_cmd.has_value());
        CHECK(*cmd.a_b_cmd == doctest::Approx(-2.0));
    }
    SUBCASE("unverified with S_a < 0 realigns toward the lead") {
        // gap below 2 h v_max + D, m placed too close to a
        const VehicleState m = vehicle(45.0, 30.0, 0.5);
        const VehicleState a = vehicle(60.0, 38.0);
        const VehicleState b = vehicle(-30.0, 38.0);
        const MergeScores s = score_gap(m, a, b, p);
        REQUIRE(s.S_a < 0.0);
        REQUIRE(s.S_b > 0.0);
        const RegionCommand cmd =
            region_control(m, a, b, MergePhase::in_region_unverified, false, p);
        CHECK(cmd.law == MergerLaw::realign_to_lead);
        const double expected = clamp_accel(
            realign_accel_to_lead(m, a, p, true) - p.xi * m.a, p.d_max, p);
        CHECK(cmd.a_m_cmd == doctest::Approx(expected));
    }
    SUBCASE("the D-less variant differs by alpha D / h") {
        const VehicleState m = vehicle(40.0, 30.0);
        const VehicleState a = vehicle(60.0, 38.0);
        const double with_d = realign_accel_to_lead(m, a, p, true);
        const double without_d = realign_accel_to_lead(m, a, p, false);
        CHECK(without_d - with_d == doctest::Approx(p.alpha * p.D / p.h));
    }
}

TEST_CASE("merge commitment") {
    CHECK(merge_allowed({39.5, 2.5}, 14.5));
    CHECK_FALSE(merge_allowed({39.5, -30.5}, 14.5));
    CHECK(merge_allowed({0.0, 0.0}, 10.0));  // boundaries inclusive
    CHECK_FALSE(merge_allowed({0.0, 0.0}, 9.999));
}

TEST_CASE("enhanced braking supervision") {
    const ControlParams p;  // d_prime_max = 3, recovery band T = 2 s at defaults

    SUBCASE("no conflict at matched speeds and equilibrium spacing") {
        const VehicleState m = vehicle(50.0, 30.0);
        VehicleState b = vehicle(50.0 - p.spacing_eq(30.0), 30.0);
        const EnhancedBrakeCommand cmd = enhanced_brake_controller(b, m, p);
        CHECK_FALSE(cmd.active);
        CHECK_FALSE(cmd.a_b_cmd.has_value());
    }
    SUBCASE("closing fast at tight spacing triggers the enhanced level") {
        // spacing term 0, (h k / alpha)(v_m - v_b) = 0.5 * (-10) = -5 < 0
        const VehicleState m = vehicle(100.0, 28.0);
        VehicleState b = vehicle(100.0 - p.D - p.h * 38.0, 38.0);
        const EnhancedBrakeCommand cmd = enhanced_brake_controller(b, m, p);
        CHECK(cmd.active);
        REQUIRE(cmd.a_b_cmd.has_value());
        CHECK(*cmd.a_b_cmd == doctest::Approx(-3.0));
    }
    SUBCASE("releases once the following command is gentle and the contrast small") {
        VehicleState m = vehicle(100.0, 30.0);
        VehicleState b = vehicle(100.0 - p.spacing_eq(31.0) - 1.0, 31.0);
        b.enhanced_brake_active = true;
        // follow command ~ alpha/h * small + k * (-1) > -3, contrast 1 < 6
        const EnhancedBrakeCommand cmd = enhanced_brake_controller(b, m, p);
        CHECK_FALSE(cmd.active);
    }
    SUBCASE("stays active while the desired braking still exceeds the level") {
        VehicleState m = vehicle(100.0, 28.0);
        VehicleState b = vehicle(100.0 - p.D - p.h * 38.0 + 2.0, 38.0);
        b.enhanced_brake_active = true;
        const EnhancedBrakeCommand cmd = enhanced_brake_controller(b, m, p);
        CHECK(cmd.active);
    }
    SUBCASE("a resolved contrast releases even outside the band") {
        VehicleState m = vehicle(100.0, 30.0);
        VehicleState b = vehicle(60.0, 29.0);  // slower than the lead
        b.enhanced_brake_active = true;
        const EnhancedBrakeCommand cmd = enhanced_brake_controller(b, m, p);
        CHECK_FALSE(cmd.active);
    }
}