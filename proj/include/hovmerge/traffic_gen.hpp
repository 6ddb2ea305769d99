#pragma once

#include "hovmerge/params.hpp"
#include "hovmerge/rng.hpp"

#include <cstdint>

namespace hovmerge {

struct TrafficGenConfig {
    int n_plat = 6;             ///< upper bound on gaps per platoon
    int l_plat = 5;             ///< platoon-separation multiplier bound
    std::uint64_t seed = 1;
    double spawn_x = -1500.0;   ///< injection position, m

    void validate() const;      ///< throws ValidationError
};

struct PlatoonSpec {
    int n_vehicles;               ///< N_gap + 1
    double separation_from_prev;  ///< L_sep: front bumper to rear bumper plus D, m
};

/// Number of vehicles for a unit draw: N_gap = max(2, Int(1 + rnd * N_plat))
/// gaps, so the result is N_gap + 1.
int platoon_size_from_unit(double rnd, int n_plat);

/// Platoon separation for a unit draw: max(1, rnd * L_plat) * (h v_max + D).
double separation_from_unit(double rnd, int l_plat, const ControlParams& p);

int sample_platoon_size(SplitMix64& rng, int n_plat);
double sample_separation(SplitMix64& rng, int l_plat, const ControlParams& p);

struct MeanFlow {
    double flow;         ///< vehicles/s
    double mean_n_gap;
    double mean_l_sep;   ///< m
};

/// Analytic mean incoming flow of the platoon stream, and the two means it is
/// built from. The theoretical maximum is v_max / (h v_max + D).
MeanFlow mean_flow(int n_plat, int l_plat, const ControlParams& p);

/// Endless platoon stream realized as a sequence of required spacings between
/// consecutive injected vehicles. Vehicles within a platoon sit at the
/// equilibrium spacing h v_max + D; platoons are separated by sampled L_sep.
/// Identical seeds give identical streams.
class PlatoonStream {
public:
    PlatoonStream(const TrafficGenConfig& cfg, const ControlParams& p);

    /// Spacing required between the previously injected vehicle and the next
    /// one. Advances the stream.
    double take_spacing();

    /// Spacing for the upcoming vehicle without consuming it.
    double peek_spacing() const { return pending_spacing_; }

    std::int64_t vehicles_emitted() const { return emitted_; }
    std::int64_t platoons_emitted() const { return platoons_; }

private:
    void begin_platoon(bool first);

    SplitMix64 rng_;
    int n_plat_;
    int l_plat_;
    double intra_spacing_;
    double unit_separation_;   ///< h v_max + D
    int remaining_in_platoon_ = 0;
    double pending_spacing_ = 0.0;
    std::int64_t emitted_ = 0;
    std::int64_t platoons_ = 0;
};

} // namespace hovmerge
