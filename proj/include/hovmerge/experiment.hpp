#pragma once

#include "hovmerge/metrics.hpp"
#include "hovmerge/world.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hovmerge {

enum class SweepVar { t_v, v_max };

const char* to_string(SweepVar var);

struct ExperimentPlan {
    SimConfig base;
    SweepVar var = SweepVar::t_v;
    std::vector<double> values;
    int replications = 5;
    std::uint64_t base_seed = 1;
    int workers = 1;

    void validate() const;
};

/// Default sweep grids used by the experiments.
std::vector<double> default_t_v_grid();
std::vector<double> default_v_max_grid();

struct SweepRow {
    std::uint64_t seed;
    double t_v;
    double v_max;
    int l_plat;
    int n_plat;
    Metrics metrics;
};

/// Number of aggregated numeric columns (a_tot, d_tot, t_ave, merge_rate,
/// mean_queue_wait, failures).
inline constexpr int aggregate_columns = 6;

/// One per-sweep-value statistic row (kind "mean" or "se"), computed from the
/// rounded (6-significant-digit) per-run values so aggregate rows can be
/// recomputed exactly from the data rows of an emitted file.
struct AggregateRow {
    std::string kind;
    double t_v;
    double v_max;
    int l_plat;
    int n_plat;
    double fields[aggregate_columns];
};

/// Safety extremes across every run of a sweep, for the invariant checks.
struct SafetySummary {
    std::int64_t total_merges = 0;
    std::int64_t total_failures = 0;
    double min_merge_s_a = 0.0;    ///< over all commit events (0 if none)
    double min_merge_s_b = 0.0;
    double min_merge_lead_gap = 0.0;
    double min_main_accel = 0.0;
    bool any_merges = false;
};

struct SweepResult {
    ExperimentPlan plan;
    std::vector<SweepRow> rows;        ///< ordered by (value index, replication)
    std::vector<AggregateRow> aggregates;
    SafetySummary safety;
};

/// Runs every (value, replication) combination, replication i seeded with
/// base_seed + i. Jobs may execute on several threads; results are ordered
/// deterministically. A collision in any run aborts the sweep with a
/// CollisionError naming the seed and sweep value.
SweepResult run_sweep(const ExperimentPlan& plan);

/// Fixed 6-significant-digit formatting used for every floating-point CSV
/// field; parsing a formatted value and formatting it again is the identity.
std::string format_sig6(double value);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Rows read back from an emitted CSV.
struct ParsedCsv {
    std::vector<std::string> header_comments;
    std::vector<std::string> column_names;
    std::vector<SweepRow> data_rows;
    struct ParsedAggregate {
        std::string kind;  ///< "mean" or "se"
        std::vector<double> fields;
    };
    std::vector<ParsedAggregate> aggregate_rows;
};

ParsedCsv read_sweep_csv(std::istream& in);

/// JSON run configuration. Omitted keys fall back to the defaults; unknown
/// keys are rejected. May contain a "sweep" section describing an
/// ExperimentPlan on top of the base configuration.
struct ParsedConfig {
    SimConfig sim;
    std::optional<ExperimentPlan> plan;
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig parse_config(const std::string& path);

} // namespace hovmerge
