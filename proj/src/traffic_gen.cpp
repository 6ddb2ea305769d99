#include "hovmerge/traffic_gen.hpp"

#include "hovmerge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hovmerge {

void TrafficGenConfig::validate() const {
    if (n_plat < 2) {
        std::ostringstream msg;
        msg << "n_plat must be >= 2, got " << n_plat;
        throw ValidationError(msg.str());
    }
    if (l_plat < 1) {
        std::ostringstream msg;
        msg << "l_plat must be >= 1, got " << l_plat;
        throw ValidationError(msg.str());
    }
}

int platoon_size_from_unit(double rnd, int n_plat) {
    const int n_gap = std::max(2, static_cast<int>(1.0 + rnd * n_plat));
    return n_gap + 1;
}

double separation_from_unit(double rnd, int l_plat, const ControlParams& p) {
    return std::max(1.0, rnd * l_plat) * (p.h * p.v_max + p.D);
}

int sample_platoon_size(SplitMix64& rng, int n_plat) {
    return platoon_size_from_unit(rng.next_unit(), n_plat);
}

double sample_separation(SplitMix64& rng, int l_plat, const ControlParams& p) {
    return separation_from_unit(rng.next_unit(), l_plat, p);
}

MeanFlow mean_flow(int n_plat, int l_plat, const ControlParams& p) {
    const double unit = p.h * p.v_max + p.D;
    const double mean_n_gap = (n_plat + 1) / 2.0 + 1.0 / n_plat;
    const double mean_l_sep =
        ((static_cast<double>(l_plat) * l_plat - 1.0) / (2.0 * l_plat) + 1.0 / l_plat) * unit;
    const double flow =
        (mean_n_gap + 1.0) * p.v_max / (mean_l_sep + mean_n_gap * unit);
    return {flow, mean_n_gap, mean_l_sep};
}

PlatoonStream::PlatoonStream(const TrafficGenConfig& cfg, const ControlParams& p)
    : rng_(cfg.seed),
      n_plat_(cfg.n_plat),
      l_plat_(cfg.l_plat),
      intra_spacing_(p.h * p.v_max + p.D),
      unit_separation_(p.h * p.v_max + p.D) {
    cfg.validate();
    begin_platoon(true);
}

void PlatoonStream::begin_platoon(bool first) {
    // one size draw per platoon, then one separation draw for every platoon
    // after the first
    remaining_in_platoon_ = sample_platoon_size(rng_, n_plat_);
    ++platoons_;
    if (first) {
        pending_spacing_ = 0.0;  // the very first vehicle enters immediately
    } else {
        pending_spacing_ =
            std::max(1.0, rng_.next_unit() * l_plat_) * unit_separation_;
    }
}

double PlatoonStream::take_spacing() {
    const double spacing = pending_spacing_;
    ++emitted_;
    --remaining_in_platoon_;
    if (remaining_in_platoon_ > 0) {
        pending_spacing_ = intra_spacing_;
    } else {
        begin_platoon(false);
    }
    return spacing;
}

} // namespace hovmerge
