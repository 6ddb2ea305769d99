#include "hovmerge/world.hpp"

#include "hovmerge/control.hpp"
#include "hovmerge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace hovmerge {

namespace {

SimConfig prepared(SimConfig cfg) {
    cfg.traffic.seed = cfg.seed;  // one seed drives the whole run
    cfg.validate();
    return cfg;
}

} // namespace

void SimConfig::validate() const {
    control.validate();
    traffic.validate();
    if (!(t_max >= 0.0)) throw ValidationError("t_max must be nonnegative");
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(decision_period > 0.0)) throw ValidationError("decision_period must be positive");
    if (!(despawn_x > control.L)) {
        throw ValidationError("despawn_x must lie beyond the merge region end L");
    }
    if (!(traffic.spawn_x < -control.x_g_dist)) {
        throw ValidationError("spawn_x must be upstream of the ramp hold point");
    }
    if (ramp_demand == RampDemand::timed && !(ramp_arrival_interval > 0.0)) {
        throw ValidationError("timed ramp demand requires ramp_arrival_interval > 0");
    }
    const double v_m0 = std::sqrt(2.0 * control.x_g_dist * control.a_max);
    if (v_m0 > control.v_max) {
        std::ostringstream msg;
        msg << "release velocity v_m0 = " << v_m0 << " exceeds v_max = " << control.v_max;
        throw ValidationError(msg.str());
    }
    if (enhanced_braking) {
        control.validate_for_linear_analysis();  // the release band needs real eigenvalues
    }
    decision_stride();  // throws if dt and decision_period are incompatible
}

int SimConfig::decision_stride() const {
    // dt must tile the decision clock: either several steps per decision
    // (dt divides the period) or whole decisions per step (period divides dt).
    const double ratio = decision_period / dt;
    if (ratio >= 1.0) {
        const auto stride = static_cast<int>(std::llround(ratio));
        if (std::abs(stride * dt - decision_period) > 1e-9) {
            throw ValidationError("dt must divide the decision period");
        }
        return stride;
    }
    const double inv = dt / decision_period;
    if (std::abs(inv - std::round(inv)) > 1e-9) {
        throw ValidationError("dt must be a multiple of the decision period");
    }
    return 1;
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::spawn: return "spawn";
        case EventKind::despawn: return "despawn";
        case EventKind::queue_occupy: return "queue_occupy";
        case EventKind::release: return "release";
        case EventKind::enter_region: return "enter_region";
        case EventKind::merge: return "merge";
        case EventKind::merge_fail: return "merge_fail";
        case EventKind::enhanced_on: return "enhanced_on";
        case EventKind::enhanced_off: return "enhanced_off";
    }
    return "?";
}

World::World(const SimConfig& cfg)
    : cfg_(prepared(cfg)), stream_(cfg_.traffic, cfg_.control) {
    decision_stride_ = cfg_.decision_stride();
}

void World::log(EventKind kind, const VehicleState& v) {
    if (cfg_.record_events) {
        events_.push_back({clock(), kind, v.id, v.x, v.v});
    }
}

VehicleState* World::find_main(std::int64_t id) {
    for (auto& v : main_) {
        if (v.id == id) return &v;
    }
    return nullptr;
}

void World::spawn_due_vehicles() {
    while (true) {
        double pos;
        if (main_.empty()) {
            pos = cfg_.traffic.spawn_x;
        } else {
            const double room = main_.back().x - cfg_.traffic.spawn_x;
            if (room < stream_.peek_spacing()) break;  // injection stalls, never overlaps
            pos = main_.back().x - stream_.peek_spacing();
        }
        const bool in_first_platoon = stream_.platoons_emitted() == 1;
        stream_.take_spacing();

        VehicleState v;
        v.id = next_id_++;
        v.x = pos;
        v.v = cfg_.control.v_max;
        v.lane = Lane::main;
        v.spawn_time = clock();
        v.spawn_x = pos;
        main_.push_back(v);
        ++spawned_main_;
        if (in_first_platoon) ++first_platoon_size_;
        log(EventKind::spawn, v);
    }
}

void World::occupy_hold_point() {
    RampVehicle rv;
    rv.state.id = next_id_++;
    rv.state.x = cfg_.control.hold_point();
    rv.state.lane = Lane::ramp;
    rv.state.spawn_time = clock();
    rv.state.spawn_x = rv.state.x;
    rv.occupy_time = clock();
    ramp_ = rv;
    ++ramp_spawned_;
    log(EventKind::queue_occupy, rv.state);
}

void World::refill_ramp_queue() {
    switch (cfg_.ramp_demand) {
        case RampDemand::disabled:
            return;
        case RampDemand::saturated:
            if (!ramp_) occupy_hold_point();
            return;
        case RampDemand::timed:
            while (clock() >= next_ramp_arrival_) {
                ++pending_ramp_arrivals_;
                next_ramp_arrival_ += cfg_.ramp_arrival_interval;
            }
            if (!ramp_ && pending_ramp_arrivals_ > 0) {
                --pending_ramp_arrivals_;
                occupy_hold_point();
            }
            return;
    }
}

void World::try_release() {
    const ControlParams& p = cfg_.control;
    double best_t_a = std::numeric_limits<double>::infinity();
    std::size_t best = main_.size();
    for (std::size_t i = 0; i + 1 < main_.size(); ++i) {
        const VehicleState& a = main_[i];
        const VehicleState& b = main_[i + 1];
        if (!candidate_gap(a, b, p)) continue;
        if (!release_check(a, b, p)) continue;
        const double t_a = -a.x / a.v;
        if (t_a < best_t_a) {
            best_t_a = t_a;
            best = i;
        }
    }
    if (best >= main_.size()) return;

    ramp_->phase = MergePhase::released;
    ramp_->lead_id = main_[best].id;
    ramp_->trail_id = main_[best + 1].id;
    ramp_->release_time = clock();
    ramp_->v_m0 = release_velocity(p);
    if (measuring_) acc_.record_queue_wait(clock() - ramp_->occupy_time);
    log(EventKind::release, ramp_->state);
}

void World::run_in_region() {
    const ControlParams& p = cfg_.control;
    VehicleState& m = ramp_->state;

    if (m.x > p.L) {
        fail_merge();
        return;
    }
    if (m.x >= 0.5 * p.L) ramp_->past_midpoint = true;

    // Gap endpoints that left the road no longer constrain the merge.
    VehicleState far_lead;
    far_lead.x = m.x + 1e9;
    far_lead.v = p.v_max;
    VehicleState far_trail;
    far_trail.x = m.x - 1e9;
    far_trail.v = p.v_max;
    const VehicleState* a = find_main(ramp_->lead_id);
    const VehicleState* b = find_main(ramp_->trail_id);
    const VehicleState& av = a ? *a : far_lead;
    const VehicleState& bv = b ? *b : far_trail;

    const bool verified = gap_verified(m, av, bv, p);
    ramp_->phase =
        verified ? MergePhase::in_region_verified : MergePhase::in_region_unverified;

    const MergeScores scores = score_gap(m, av, bv, p);
    const double lead_gap = av.x - m.x - p.D;
    if (verified && merge_allowed(scores, lead_gap)) {
        merge_records_.push_back({clock(), scores.S_a, scores.S_b, lead_gap});
        commit_merge();
        return;
    }

    const RegionCommand cmd =
        region_control(m, av, bv, ramp_->phase, ramp_->past_midpoint, p,
                       cfg_.include_d_in_realign);
    ramp_->region_law = cmd.law;
    if (cmd.a_b_cmd && b) forced_brake_.push_back(b->id);
}

void World::commit_merge() {
    VehicleState m = ramp_->state;
    m.lane = Lane::main;
    m.merged_from_ramp = true;
    const std::int64_t trail_id = ramp_->trail_id;
    ramp_.reset();

    const auto it = std::find_if(main_.begin(), main_.end(),
                                 [&](const VehicleState& v) { return v.x < m.x; });
    main_.insert(it, m);
    ++merged_;
    if (measuring_) acc_.record_merge(clock());
    log(EventKind::merge, m);

    if (VehicleState* b = find_main(trail_id)) {
        b->watch_lead_id = m.id;  // post-merge supervision of the trailer
    }
    refill_ramp_queue();  // the next queued vehicle occupies the hold point now
}

void World::fail_merge() {
    ++failed_;
    if (measuring_) ++acc_.failures;
    log(EventKind::merge_fail, ramp_->state);
    ramp_.reset();
    refill_ramp_queue();
}

void World::supervise_post_merge() {
    for (auto& v : main_) {
        if (v.watch_lead_id < 0) continue;
        const VehicleState* lead = find_main(v.watch_lead_id);
        if (!lead) {
            v.watch_lead_id = -1;
            v.enhanced_brake_active = false;
            continue;
        }
        if (cfg_.enhanced_braking) {
            const EnhancedBrakeCommand res =
                enhanced_brake_controller(v, *lead, cfg_.control);
            if (res.active != v.enhanced_brake_active) {
                log(res.active ? EventKind::enhanced_on : EventKind::enhanced_off, v);
            }
            v.enhanced_brake_active = res.active;
        }
        if (!v.enhanced_brake_active && v.v <= lead->v) {
            v.watch_lead_id = -1;  // contrast resolved, episode over
        }
    }
}

void World::run_protocol_decisions() {
    forced_brake_.clear();
    if (ramp_) {
        if (ramp_->phase == MergePhase::queued) {
            try_release();
        } else {
            if (ramp_->phase == MergePhase::released && ramp_->state.x >= 0.0) {
                log(EventKind::enter_region, ramp_->state);
                const VehicleState* a = find_main(ramp_->lead_id);
                const VehicleState* b = find_main(ramp_->trail_id);
                entry_records_.push_back({clock(), ramp_->state.v,
                                          a ? a->x : std::numeric_limits<double>::quiet_NaN(),
                                          b ? b->x : std::numeric_limits<double>::quiet_NaN()});
                ramp_->phase = MergePhase::in_region_unverified;
            }
            if (ramp_->phase != MergePhase::released) {
                run_in_region();
            }
        }
    }
    supervise_post_merge();
}

void World::compute_commands() {
    const ControlParams& p = cfg_.control;
    for (std::size_t i = 0; i < main_.size(); ++i) {
        VehicleState& v = main_[i];
        double desired;
        if (i == 0) {
            // stream leader: track the lane speed
            desired = std::min(p.k * (p.v_max - v.v), p.a_max);
        } else {
            desired = desired_accel_follow(main_[i - 1], v, p);
        }
        const bool forced =
            std::find(forced_brake_.begin(), forced_brake_.end(), v.id) != forced_brake_.end();
        if (v.enhanced_brake_active) {
            desired = -p.d_prime_max;
        } else if (forced) {
            desired = -p.d_max;
        }
        const double limit_low = v.enhanced_brake_active ? p.d_prime_max : p.d_max;
        v.a_cmd = clamp_accel(desired, limit_low, p);
    }

    if (!ramp_) return;
    VehicleState& m = ramp_->state;
    switch (ramp_->phase) {
        case MergePhase::queued:
            m.a_cmd = 0.0;
            break;
        case MergePhase::released:
            m.a_cmd = clamp_accel(ramp_accel(m, ramp_->v_m0, p), p.d_max, p);
            break;
        case MergePhase::in_region_unverified:
        case MergePhase::in_region_verified: {
            VehicleState far_lead;
            far_lead.x = m.x + 1e9;
            far_lead.v = p.v_max;
            VehicleState far_trail;
            far_trail.x = m.x - 1e9;
            far_trail.v = p.v_max;
            const VehicleState* a = find_main(ramp_->lead_id);
            const VehicleState* b = find_main(ramp_->trail_id);
            const VehicleState& av = a ? *a : far_lead;
            const VehicleState& bv = b ? *b : far_trail;
            switch (ramp_->region_law) {
                case MergerLaw::follow_lead:
                    m.a_cmd = clamp_accel(desired_accel_follow(av, m, p), p.d_max, p);
                    break;
                case MergerLaw::realign_to_lead:
                    m.a_cmd = clamp_accel(
                        realign_accel_to_lead(m, av, p, cfg_.include_d_in_realign)
                            - p.xi * m.a,
                        p.d_max, p);
                    break;
                case MergerLaw::realign_to_trail:
                    m.a_cmd = clamp_accel(
                        realign_accel_to_trail(m, bv, p, cfg_.include_d_in_realign)
                            - p.xi * m.a,
                        p.d_max, p);
                    break;
                case MergerLaw::brake_half:
                    m.a_cmd = -0.5 * p.d_max;
                    break;
                case MergerLaw::hold_zero:
                    m.a_cmd = 0.0;
                    break;
            }
            break;
        }
        case MergePhase::merged:
        case MergePhase::failed:
            break;  // never held in ramp_ in these phases
    }
}

void World::integrate_all() {
    const ControlParams& p = cfg_.control;
    const double dt = cfg_.dt;

    for (auto& v : main_) {
        v.a = lag_step(v.a, v.a_cmd, p.tau, dt);
        const KinematicStep ks = kinematic_step_raw(v.x, v.v, v.a, dt, p);
        if (measuring_) {
            const bool trailing_role =
                v.watch_lead_id >= 0
                || (ramp_ && ramp_->phase != MergePhase::queued && v.id == ramp_->trail_id);
            acc_.add_accel_sample(v.a, ks.accel_duration, trailing_role, v.merged_from_ramp);
        }
        if (ks.accel_duration > 0.0 && v.a < min_main_accel_) min_main_accel_ = v.a;
        v.x = ks.x;
        v.v = ks.v;
    }

    if (ramp_ && ramp_->phase != MergePhase::queued) {
        VehicleState& m = ramp_->state;
        m.a = lag_step(m.a, m.a_cmd, p.tau, dt);
        const KinematicStep ks = kinematic_step_raw(m.x, m.v, m.a, dt, p);
        m.x = ks.x;
        m.v = ks.v;
    }
}

void World::despawn_passed_vehicles() {
    const ControlParams& p = cfg_.control;
    while (!main_.empty() && main_.front().x >= cfg_.despawn_x) {
        const VehicleState v = main_.front();
        const double delay = (clock() - v.spawn_time) - (v.x - v.spawn_x) / p.v_max;
        if (!v.merged_from_ramp) {
            ++despawned_original_;
            if (measuring_) {
                acc_.record_delay(delay);
            } else if (despawned_original_ == first_platoon_size_) {
                // the first platoon has traversed the full span: start measuring
                measuring_ = true;
                warmup_end_ = clock();
                acc_.measure_start = clock();
                acc_.measure_end = clock();
            }
        }
        ++despawned_;
        log(EventKind::despawn, v);
        main_.pop_front();
    }
}

void World::detect_collisions() const {
    const ControlParams& p = cfg_.control;
    for (std::size_t i = 0; i + 1 < main_.size(); ++i) {
        const double gap = main_[i].x - main_[i + 1].x - p.D;
        if (gap <= 0.0) {
            std::ostringstream msg;
            msg << "collision at t = " << clock() << " s: vehicle " << main_[i + 1].id
                << " reached vehicle " << main_[i].id << " (bumper gap " << gap << " m)";
            throw CollisionError(msg.str());
        }
    }
}

void World::step() {
    spawn_due_vehicles();
    refill_ramp_queue();
    if (step_index_ % decision_stride_ == 0) {
        run_protocol_decisions();
    }
    compute_commands();
    integrate_all();
    ++step_index_;
    if (measuring_) acc_.measure_end = clock();
    despawn_passed_vehicles();
    detect_collisions();
}

void World::run() {
    const auto steps = static_cast<std::int64_t>(std::llround(cfg_.t_max / cfg_.dt));
    for (std::int64_t i = 0; i < steps; ++i) step();
}

void World::check_invariants() const {
    const ControlParams& p = cfg_.control;
    for (std::size_t i = 0; i + 1 < main_.size(); ++i) {
        if (!(main_[i].x > main_[i + 1].x)) {
            throw std::logic_error("main lane out of order");
        }
        if (!(main_[i].x - main_[i + 1].x - p.D > 0.0)) {
            throw std::logic_error("nonpositive bumper gap");
        }
    }
    const auto on_road = static_cast<std::int64_t>(main_.size());
    if (spawned_main_ + merged_ - despawned_ != on_road) {
        throw std::logic_error("vehicle conservation violated on the main lane");
    }
    if (ramp_spawned_ != merged_ + failed_ + (ramp_ ? 1 : 0)) {
        throw std::logic_error("vehicle conservation violated on the ramp");
    }
    for (const auto& v : main_) {
        if (v.v < 0.0 || v.v > p.v_max + 1e-12) {
            throw std::logic_error("velocity bound violated");
        }
    }
}

RunResult World::take_result() {
    RunResult r;
    r.metrics = finalize(acc_);
    r.accumulator = std::move(acc_);
    r.events = std::move(events_);
    r.merge_records = std::move(merge_records_);
    r.entry_records = std::move(entry_records_);
    r.spawned_main = spawned_main_;
    r.despawned = despawned_;
    r.merged = merged_;
    r.failed = failed_;
    r.min_main_accel = min_main_accel_;
    r.warmup_end = warmup_end_;
    r.final_time = clock();
    return r;
}

RunResult run_simulation(const SimConfig& cfg) {
    World world(cfg);
    world.run();
    return world.take_result();
}

void write_event_log(std::ostream& out, const std::vector<Event>& events) {
    for (const Event& e : events) {
        out << e.time << ' ' << e.vehicle << ' ' << to_string(e.kind) << ' ' << e.x << ' '
            << e.v << '\n';
    }
}

} // namespace hovmerge
