#include "hovmerge/experiment.hpp"

#include "hovmerge/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace hovmerge {

const char* to_string(SweepVar var) {
    return var == SweepVar::t_v ? "T_v" : "v_max";
}

std::vector<double> default_t_v_grid() {
    return {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
}

std::vector<double> default_v_max_grid() {
    return {33.0, 34.0, 35.0, 36.0, 37.0, 38.0};
}

void ExperimentPlan::validate() const {
    if (replications < 1) throw ValidationError("replications must be >= 1");
    if (values.empty()) throw ValidationError("sweep values must be non-empty");
    if (workers < 1) throw ValidationError("workers must be >= 1");
    const double v_m0 = std::sqrt(2.0 * base.control.x_g_dist * base.control.a_max);
    for (const double v : values) {
        if (var == SweepVar::v_max && !(v > v_m0)) {
            std::ostringstream msg;
            msg << "swept v_max = " << v << " must exceed the release velocity v_m0 = "
                << v_m0;
            throw ValidationError(msg.str());
        }
        if (var == SweepVar::t_v && v < 0.0) {
            throw ValidationError("swept T_v values must be nonnegative");
        }
    }
    base.validate();
}

std::string format_sig6(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

namespace {

double roundtrip6(double value) {
    return std::strtod(format_sig6(value).c_str(), nullptr);
}

SimConfig config_for(const ExperimentPlan& plan, double value, int replication) {
    SimConfig cfg = plan.base;
    if (plan.var == SweepVar::t_v) {
        cfg.control.T_v = value;
    } else {
        cfg.control.v_max = value;
    }
    cfg.seed = plan.base_seed + static_cast<std::uint64_t>(replication);
    return cfg;
}

struct RunSafety {
    std::int64_t merges = 0;
    std::int64_t failures = 0;
    double min_s_a = 0.0;
    double min_s_b = 0.0;
    double min_lead_gap = 0.0;
    double min_main_accel = 0.0;
    bool any = false;
};

void fold_safety(SafetySummary& total, const RunSafety& run) {
    total.total_merges += run.merges;
    total.total_failures += run.failures;
    total.min_main_accel = std::min(total.min_main_accel, run.min_main_accel);
    if (run.any) {
        if (!total.any_merges) {
            total.min_merge_s_a = run.min_s_a;
            total.min_merge_s_b = run.min_s_b;
            total.min_merge_lead_gap = run.min_lead_gap;
            total.any_merges = true;
        } else {
            total.min_merge_s_a = std::min(total.min_merge_s_a, run.min_s_a);
            total.min_merge_s_b = std::min(total.min_merge_s_b, run.min_s_b);
            total.min_merge_lead_gap = std::min(total.min_merge_lead_gap, run.min_lead_gap);
        }
    }
}

} // namespace

SweepResult run_sweep(const ExperimentPlan& plan) {
    plan.validate();

    struct Job {
        std::size_t value_index;
        int replication;
    };
    std::vector<Job> jobs;
    jobs.reserve(plan.values.size() * static_cast<std::size_t>(plan.replications));
    for (std::size_t vi = 0; vi < plan.values.size(); ++vi) {
        for (int r = 0; r < plan.replications; ++r) jobs.push_back({vi, r});
    }

    std::vector<SweepRow> rows(jobs.size());
    std::vector<RunSafety> safeties(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&] {
        while (!failed.load()) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            const Job job = jobs[j];
            const double value = plan.values[job.value_index];
            const SimConfig cfg = config_for(plan, value, job.replication);
            try {
                RunResult rr = run_simulation(cfg);
                SweepRow& row = rows[j];
                row.seed = cfg.seed;
                row.t_v = cfg.control.T_v;
                row.v_max = cfg.control.v_max;
                row.l_plat = cfg.traffic.l_plat;
                row.n_plat = cfg.traffic.n_plat;
                row.metrics = rr.metrics;

                RunSafety& s = safeties[j];
                s.merges = rr.merged;
                s.failures = rr.failed;
                s.min_main_accel = rr.min_main_accel;
                s.any = !rr.merge_records.empty();
                if (s.any) {
                    s.min_s_a = rr.merge_records.front().s_a;
                    s.min_s_b = rr.merge_records.front().s_b;
                    s.min_lead_gap = rr.merge_records.front().lead_gap;
                    for (const MergeRecord& mr : rr.merge_records) {
                        s.min_s_a = std::min(s.min_s_a, mr.s_a);
                        s.min_s_b = std::min(s.min_s_b, mr.s_b);
                        s.min_lead_gap = std::min(s.min_lead_gap, mr.lead_gap);
                    }
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    std::ostringstream msg;
                    msg << "run failed (seed = " << cfg.seed << ", " << to_string(plan.var)
                        << " = " << value << "): " << e.what();
                    first_error = std::make_exception_ptr(CollisionError(msg.str()));
                }
                failed.store(true);
                return;
            }
        }
    };

    const int thread_count =
        std::min<std::size_t>(static_cast<std::size_t>(plan.workers), jobs.size());
    if (thread_count <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(thread_count));
        for (int i = 0; i < thread_count; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    SweepResult result;
    result.plan = plan;
    result.rows = std::move(rows);
    for (const RunSafety& s : safeties) fold_safety(result.safety, s);

    // Per-value aggregates over the rounded per-run values, in row order.
    for (std::size_t vi = 0; vi < plan.values.size(); ++vi) {
        const std::size_t begin = vi * static_cast<std::size_t>(plan.replications);
        const auto n = static_cast<std::size_t>(plan.replications);
        double mean[aggregate_columns] = {};
        double se[aggregate_columns] = {};
        std::vector<std::array<double, aggregate_columns>> samples(n);
        for (std::size_t r = 0; r < n; ++r) {
            const Metrics& m = result.rows[begin + r].metrics;
            samples[r] = {roundtrip6(m.a_tot),      roundtrip6(m.d_tot),
                          roundtrip6(m.t_ave),      roundtrip6(m.merge_rate),
                          roundtrip6(m.mean_queue_wait),
                          static_cast<double>(m.failures)};
            for (int c = 0; c < aggregate_columns; ++c) mean[c] += samples[r][c];
        }
        for (int c = 0; c < aggregate_columns; ++c) mean[c] /= static_cast<double>(n);
        if (n >= 2) {
            for (std::size_t r = 0; r < n; ++r) {
                for (int c = 0; c < aggregate_columns; ++c) {
                    const double d = samples[r][c] - mean[c];
                    se[c] += d * d;
                }
            }
            for (int c = 0; c < aggregate_columns; ++c) {
                se[c] = std::sqrt(se[c] / static_cast<double>(n - 1))
                        / std::sqrt(static_cast<double>(n));
            }
        }

        const SweepRow& representative = result.rows[begin];
        AggregateRow mean_row{"mean", representative.t_v, representative.v_max,
                              representative.l_plat, representative.n_plat, {}};
        AggregateRow se_row{"se", representative.t_v, representative.v_max,
                            representative.l_plat, representative.n_plat, {}};
        for (int c = 0; c < aggregate_columns; ++c) {
            mean_row.fields[c] = mean[c];
            se_row.fields[c] = se[c];
        }
        result.aggregates.push_back(mean_row);
        result.aggregates.push_back(se_row);
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    const ExperimentPlan& plan = result.plan;
    out << "# hovmerge sweep results\n";
    out << "# sweep_var = " << to_string(plan.var) << "\n";
    out << "# values =";
    for (const double v : plan.values) out << ' ' << format_sig6(v);
    out << "\n";
    out << "# replications = " << plan.replications << "\n";
    out << "# base_seed = " << plan.base_seed << "\n";
    out << "# t_max = " << format_sig6(plan.base.t_max) << "\n";
    out << "# dt = " << format_sig6(plan.base.dt) << "\n";
    out << "# l_plat = " << plan.base.traffic.l_plat << "\n";
    out << "# n_plat = " << plan.base.traffic.n_plat << "\n";
    if (plan.var != SweepVar::t_v) {
        out << "# T_v = " << format_sig6(plan.base.control.T_v) << "\n";
    }
    if (plan.var != SweepVar::v_max) {
        out << "# v_max = " << format_sig6(plan.base.control.v_max) << "\n";
    }
    out << "# enhanced_braking = " << (plan.base.enhanced_braking ? 1 : 0) << "\n";
    out << "seed,T_v,v_max,l_plat,n_plat,a_tot,d_tot,t_ave,merge_rate,mean_queue_wait,"
           "failures\n";

    auto write_data_row = [&](const SweepRow& row) {
        out << row.seed << ',' << format_sig6(row.t_v) << ',' << format_sig6(row.v_max)
            << ',' << row.l_plat << ',' << row.n_plat << ','
            << format_sig6(row.metrics.a_tot) << ',' << format_sig6(row.metrics.d_tot)
            << ',' << format_sig6(row.metrics.t_ave) << ','
            << format_sig6(row.metrics.merge_rate) << ','
            << format_sig6(row.metrics.mean_queue_wait) << ',' << row.metrics.failures
            << '\n';
    };
    auto write_aggregate_row = [&](const AggregateRow& row) {
        out << row.kind << ',' << format_sig6(row.t_v) << ',' << format_sig6(row.v_max)
            << ',' << row.l_plat << ',' << row.n_plat;
        for (int c = 0; c < aggregate_columns; ++c) out << ',' << format_sig6(row.fields[c]);
        out << '\n';
    };

    for (std::size_t vi = 0; vi < plan.values.size(); ++vi) {
        const std::size_t begin = vi * static_cast<std::size_t>(plan.replications);
        for (int r = 0; r < plan.replications; ++r) {
            write_data_row(result.rows[begin + static_cast<std::size_t>(r)]);
        }
        write_aggregate_row(result.aggregates[2 * vi]);
        write_aggregate_row(result.aggregates[2 * vi + 1]);
    }
}

ParsedCsv read_sweep_csv(std::istream& in) {
    ParsedCsv parsed;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.front() == '#') {
            parsed.header_comments.push_back(line);
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!header_seen) {
            parsed.column_names = fields;
            header_seen = true;
            continue;
        }
        if (fields.size() != 11) {
            throw ValidationError("malformed CSV row: " + line);
        }
        if (fields[0] == "mean" || fields[0] == "se") {
            ParsedCsv::ParsedAggregate agg;
            agg.kind = fields[0];
            for (std::size_t i = 1; i < fields.size(); ++i) {
                agg.fields.push_back(std::strtod(fields[i].c_str(), nullptr));
            }
            parsed.aggregate_rows.push_back(agg);
        } else {
            SweepRow row;
            row.seed = std::strtoull(fields[0].c_str(), nullptr, 10);
            row.t_v = std::strtod(fields[1].c_str(), nullptr);
            row.v_max = std::strtod(fields[2].c_str(), nullptr);
            row.l_plat = std::atoi(fields[3].c_str());
            row.n_plat = std::atoi(fields[4].c_str());
            row.metrics.a_tot = std::strtod(fields[5].c_str(), nullptr);
            row.metrics.d_tot = std::strtod(fields[6].c_str(), nullptr);
            row.metrics.t_ave = std::strtod(fields[7].c_str(), nullptr);
            row.metrics.merge_rate = std::strtod(fields[8].c_str(), nullptr);
            row.metrics.mean_queue_wait = std::strtod(fields[9].c_str(), nullptr);
            row.metrics.failures = std::strtoll(fields[10].c_str(), nullptr, 10);
            parsed.data_rows.push_back(row);
        }
    }
    return parsed;
}

namespace {

using nlohmann::json;

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

RampDemand ramp_demand_of(const std::string& name) {
    if (name == "saturated") return RampDemand::saturated;
    if (name == "timed") return RampDemand::timed;
    if (name == "disabled") return RampDemand::disabled;
    throw ValidationError("ramp_demand must be one of saturated, timed, disabled; got \""
                          + name + "\"");
}

SweepVar sweep_var_of(const std::string& name) {
    if (name == "T_v") return SweepVar::t_v;
    if (name == "v_max") return SweepVar::v_max;
    throw ValidationError("sweep variable must be T_v or v_max; got \"" + name + "\"");
}

template <typename T>
T get_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ValidationError("config key \"" + key + "\" has the wrong type");
    }
}

ExperimentPlan parse_sweep_section(const json& sweep, const SimConfig& sim) {
    ExperimentPlan plan;
    plan.base = sim;
    plan.base_seed = sim.seed;
    bool values_given = false;
    for (const auto& [key, value] : sweep.items()) {
        if (key == "variable") {
            plan.var = sweep_var_of(get_as<std::string>(value, key));
        } else if (key == "values") {
            plan.values = get_as<std::vector<double>>(value, key);
            values_given = true;
        } else if (key == "replications") {
            plan.replications = get_as<int>(value, key);
        } else if (key == "base_seed") {
            plan.base_seed = get_as<std::uint64_t>(value, key);
        } else if (key == "workers") {
            plan.workers = get_as<int>(value, key);
        } else {
            throw ValidationError("unknown sweep key \"" + key + "\"");
        }
    }
    if (!values_given) {
        plan.values = plan.var == SweepVar::t_v ? default_t_v_grid() : default_v_max_grid();
    }
    return plan;
}

} // namespace

ParsedConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = text.empty() ? json::object() : json::parse(text);
    } catch (const json::parse_error& e) {
        std::ostringstream msg;
        msg << "config parse error at line " << line_of_byte(text, e.byte) << ": "
            << e.what();
        throw ValidationError(msg.str());
    }
    if (!root.is_object()) {
        throw ValidationError("config must be a JSON object");
    }

    ParsedConfig out;
    SimConfig& cfg = out.sim;
    bool d_prime_given = false;
    const json* sweep_section = nullptr;

    for (const auto& [key, value] : root.items()) {
        if (key == "alpha") cfg.control.alpha = get_as<double>(value, key);
        else if (key == "h") cfg.control.h = get_as<double>(value, key);
        else if (key == "k") cfg.control.k = get_as<double>(value, key);
        else if (key == "xi") cfg.control.xi = get_as<double>(value, key);
        else if (key == "tau") cfg.control.tau = get_as<double>(value, key);
        else if (key == "D") cfg.control.D = get_as<double>(value, key);
        else if (key == "d_max") cfg.control.d_max = get_as<double>(value, key);
        else if (key == "a_max") cfg.control.a_max = get_as<double>(value, key);
        else if (key == "v_max") cfg.control.v_max = get_as<double>(value, key);
        else if (key == "L") cfg.control.L = get_as<double>(value, key);
        else if (key == "x_g_dist") cfg.control.x_g_dist = get_as<double>(value, key);
        else if (key == "T_v") cfg.control.T_v = get_as<double>(value, key);
        else if (key == "d_prime_max") {
            cfg.control.d_prime_max = get_as<double>(value, key);
            d_prime_given = true;
        }
        else if (key == "n_plat") cfg.traffic.n_plat = get_as<int>(value, key);
        else if (key == "l_plat") cfg.traffic.l_plat = get_as<int>(value, key);
        else if (key == "spawn_x") cfg.traffic.spawn_x = get_as<double>(value, key);
        else if (key == "t_max") cfg.t_max = get_as<double>(value, key);
        else if (key == "dt") cfg.dt = get_as<double>(value, key);
        else if (key == "decision_period") cfg.decision_period = get_as<double>(value, key);
        else if (key == "despawn_x") cfg.despawn_x = get_as<double>(value, key);
        else if (key == "seed") cfg.seed = get_as<std::uint64_t>(value, key);
        else if (key == "ramp_demand") cfg.ramp_demand = ramp_demand_of(get_as<std::string>(value, key));
        else if (key == "ramp_arrival_interval") cfg.ramp_arrival_interval = get_as<double>(value, key);
        else if (key == "enhanced_braking") cfg.enhanced_braking = get_as<bool>(value, key);
        else if (key == "include_d_in_realign") cfg.include_d_in_realign = get_as<bool>(value, key);
        else if (key == "record_events") cfg.record_events = get_as<bool>(value, key);
        else if (key == "sweep") sweep_section = &value;
        else throw ValidationError("unknown config key \"" + key + "\"");
    }
    if (!d_prime_given) {
        cfg.control.d_prime_max = 1.5 * cfg.control.d_max;
    }
    cfg.traffic.seed = cfg.seed;
    cfg.validate();

    if (sweep_section) {
        out.plan = parse_sweep_section(*sweep_section, cfg);
        out.plan->validate();
    }
    return out;
}

ParsedConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

} // namespace hovmerge
