#pragma once

#include "hovmerge/merge.hpp"
#include "hovmerge/metrics.hpp"
#include "hovmerge/params.hpp"
#include "hovmerge/traffic_gen.hpp"
#include "hovmerge/vehicle.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hovmerge {

enum class RampDemand { saturated, timed, disabled };

struct SimConfig {
    ControlParams control;
    TrafficGenConfig traffic;
    double t_max = 2000.0;
    double dt = 0.1;
    double decision_period = 0.1;  ///< protocol decisions run on this clock
    double despawn_x = 1500.0;
    std::uint64_t seed = 1;
    RampDemand ramp_demand = RampDemand::saturated;
    double ramp_arrival_interval = 0.0;  ///< s, timed demand only
    bool enhanced_braking = true;
    bool include_d_in_realign = true;    ///< D-offset form of the unverified-gap law
    bool record_events = true;

    void validate() const;
    /// Steps between protocol decision ticks for this dt.
    int decision_stride() const;
};

enum class EventKind {
    spawn,
    despawn,
    queue_occupy,
    release,
    enter_region,
    merge,
    merge_fail,
    enhanced_on,
    enhanced_off,
};

const char* to_string(EventKind kind);

struct Event {
    double time;
    EventKind kind;
    std::int64_t vehicle;
    double x;
    double v;
};

/// The single ramp vehicle currently in the merge pipeline (queue head or
/// released/in-region merger).
struct RampVehicle {
    VehicleState state;
    MergePhase phase = MergePhase::queued;
    bool past_midpoint = false;
    std::int64_t lead_id = -1;   ///< assigned gap lead (a)
    std::int64_t trail_id = -1;  ///< assigned gap trailer (b)
    double occupy_time = 0.0;
    double release_time = 0.0;
    double v_m0 = 0.0;
    MergerLaw region_law = MergerLaw::follow_lead;  ///< from the last decision tick
};

/// Snapshot of the merge conditions at the commit instant.
struct MergeRecord {
    double time;
    double s_a;
    double s_b;
    double lead_gap;  ///< bumper gap to a, m
};

/// Snapshot taken when the released vehicle crosses the region entrance.
struct EntryRecord {
    double time;
    double v;    ///< merger velocity at entry
    double a_x;  ///< assigned lead position (should already be past 0)
    double b_x;  ///< assigned trailer position (should still be upstream)
};

struct RunResult {
    Metrics metrics;
    MetricsAccumulator accumulator;
    std::vector<Event> events;
    std::vector<MergeRecord> merge_records;
    std::vector<EntryRecord> entry_records;
    std::int64_t spawned_main = 0;
    std::int64_t despawned = 0;
    std::int64_t merged = 0;
    std::int64_t failed = 0;
    double min_main_accel = 0.0;  ///< most negative realized main-lane acceleration
    double warmup_end = 0.0;      ///< 0 when the warm-up never completed
    double final_time = 0.0;
};

/// World state plus the fixed-step loop. One instance per run; independent
/// instances are safe to run on separate threads.
class World {
public:
    explicit World(const SimConfig& cfg);

    /// One integration step. Throws CollisionError on a simulation fault.
    void step();

    /// Runs until t_max.
    void run();

    RunResult take_result();

    double clock() const { return static_cast<double>(step_index_) * cfg_.dt; }
    const std::deque<VehicleState>& main_lane() const { return main_; }
    const std::optional<RampVehicle>& ramp() const { return ramp_; }
    const SimConfig& config() const { return cfg_; }
    bool measuring() const { return measuring_; }

    /// Conservation and ordering checks (test support); throws on violation.
    void check_invariants() const;

private:
    void spawn_due_vehicles();
    void refill_ramp_queue();
    void occupy_hold_point();
    void run_protocol_decisions();
    void try_release();
    void run_in_region();
    void commit_merge();
    void fail_merge();
    void supervise_post_merge();
    void compute_commands();
    void integrate_all();
    void despawn_passed_vehicles();
    void detect_collisions() const;
    VehicleState* find_main(std::int64_t id);
    void log(EventKind kind, const VehicleState& v);

    SimConfig cfg_;
    PlatoonStream stream_;
    std::deque<VehicleState> main_;  ///< ordered by decreasing x
    std::optional<RampVehicle> ramp_;
    std::vector<std::int64_t> forced_brake_;  ///< ids commanded -d_max this decision window
    MetricsAccumulator acc_;
    std::vector<Event> events_;
    std::vector<MergeRecord> merge_records_;
    std::vector<EntryRecord> entry_records_;
    double min_main_accel_ = 0.0;

    std::int64_t next_id_ = 1;
    std::int64_t step_index_ = 0;
    int decision_stride_ = 1;

    bool measuring_ = false;
    double warmup_end_ = 0.0;
    std::int64_t first_platoon_size_ = 0;
    std::int64_t despawned_original_ = 0;  ///< non-merged despawns (warm-up counter)

    std::int64_t spawned_main_ = 0;
    std::int64_t ramp_spawned_ = 0;
    std::int64_t despawned_ = 0;
    std::int64_t merged_ = 0;
    std::int64_t failed_ = 0;
    std::int64_t pending_ramp_arrivals_ = 0;
    double next_ramp_arrival_ = 0.0;
};

RunResult run_simulation(const SimConfig& cfg);

/// Line-delimited event log: "time vehicle kind x v" per row.
void write_event_log(std::ostream& out, const std::vector<Event>& events);

} // namespace hovmerge
