// Command-line harness: single runs, parameter sweeps, the analytic flow
// calculator, and the closed-form controller analysis.

#include "hovmerge/errors.hpp"
#include "hovmerge/experiment.hpp"
#include "hovmerge/linear_analysis.hpp"
#include "hovmerge/traffic_gen.hpp"
#include "hovmerge/world.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace hovmerge;

struct CommonOptions {
    std::string config_path;
    std::optional<double> t_v;
    std::optional<double> v_max;
    std::optional<int> l_plat;
    std::optional<int> n_plat;
    std::optional<double> t_max;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
};

void add_common_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--tv", o.t_v, "velocity-difference weight T_v, s");
    cmd->add_option("--vmax", o.v_max, "lane maximum speed, m/s");
    cmd->add_option("--lplat", o.l_plat, "platoon separation multiplier bound");
    cmd->add_option("--nplat", o.n_plat, "platoon gap-count bound");
    cmd->add_option("--tmax", o.t_max, "run horizon, s");
    cmd->add_option("--dt", o.dt, "integration step, s");
    cmd->add_option("--seed", o.seed, "base random seed");
}

ParsedConfig effective_config(const CommonOptions& o) {
    ParsedConfig pc =
        o.config_path.empty() ? ParsedConfig{} : parse_config(o.config_path);
    if (o.t_v) pc.sim.control.T_v = *o.t_v;
    if (o.v_max) pc.sim.control.v_max = *o.v_max;
    if (o.l_plat) pc.sim.traffic.l_plat = *o.l_plat;
    if (o.n_plat) pc.sim.traffic.n_plat = *o.n_plat;
    if (o.t_max) pc.sim.t_max = *o.t_max;
    if (o.dt) pc.sim.dt = *o.dt;
    if (o.seed) pc.sim.seed = *o.seed;
    pc.sim.traffic.seed = pc.sim.seed;
    pc.sim.validate();
    return pc;
}

void echo_config(const SimConfig& cfg, std::ostream& out) {
    const ControlParams& p = cfg.control;
    out << "# effective configuration\n";
    out << "alpha = " << p.alpha << "\nh = " << p.h << "\nk = " << p.k
        << "\nxi = " << p.xi << "\ntau = " << p.tau << "\nD = " << p.D
        << "\nd_max = " << p.d_max << "\na_max = " << p.a_max << "\nv_max = " << p.v_max
        << "\nL = " << p.L << "\nx_g_dist = " << p.x_g_dist << "\nT_v = " << p.T_v
        << "\nd_prime_max = " << p.d_prime_max << "\nl_plat = " << cfg.traffic.l_plat
        << "\nn_plat = " << cfg.traffic.n_plat << "\nspawn_x = " << cfg.traffic.spawn_x
        << "\ndespawn_x = " << cfg.despawn_x << "\nt_max = " << cfg.t_max
        << "\ndt = " << cfg.dt << "\nseed = " << cfg.seed << "\nenhanced_braking = "
        << (cfg.enhanced_braking ? "true" : "false") << "\n";
}

int cmd_flow(const CommonOptions& common) {
    const ParsedConfig pc = effective_config(common);
    const ControlParams& p = pc.sim.control;
    const MeanFlow f = mean_flow(pc.sim.traffic.n_plat, pc.sim.traffic.l_plat, p);
    const double max_flow = p.v_max / (p.h * p.v_max + p.D);
    std::cout << "mean N_gap = " << format_sig6(f.mean_n_gap) << "\n";
    std::cout << "mean L_sep = " << format_sig6(f.mean_l_sep) << " m\n";
    std::cout << "mean flow = " << format_sig6(f.flow) << " vehicles/s = "
              << format_sig6(f.flow * 3600.0) << " vehicles/h\n";
    std::cout << "max flow = " << format_sig6(max_flow) << " vehicles/s = "
              << format_sig6(max_flow * 3600.0) << " vehicles/h\n";
    return 0;
}

int cmd_analysis(const CommonOptions& common, double delta_v, bool run_oracle) {
    const ParsedConfig pc = effective_config(common);
    const ControlParams& p = pc.sim.control;
    const LinearSpectrum spec = linear_spectrum(p);
    std::cout << "lambda1 = " << format_sig6(spec.lambda1) << " 1/s\n";
    std::cout << "lambda2 = " << format_sig6(spec.lambda2) << " 1/s\n";
    std::cout << "theta_peak = " << format_sig6(spec.theta_peak) << " s\n";
    std::cout << "peak_factor = " << format_sig6(spec.peak_factor) << " 1/s\n";
    std::cout << "recovery_time = " << format_sig6(spec.t_recover) << " s\n";
    const PeakDecel peak = peak_deceleration(delta_v, p);
    std::cout << "peak deceleration at delta_v = " << format_sig6(delta_v)
              << " m/s: " << format_sig6(peak.decel) << " m/s^2 at t = "
              << format_sig6(peak.theta_peak) << " s\n";
    if (run_oracle) {
        const LinearResponse resp = linear_response_oracle(delta_v, p, 1e-3);
        std::cout << "oracle minimum acceleration = " << format_sig6(resp.min_accel)
                  << " m/s^2 at t = " << format_sig6(resp.t_min_accel) << " s\n";
    }
    return 0;
}

int cmd_run(const CommonOptions& common, const std::string& events_path) {
    const ParsedConfig pc = effective_config(common);
    echo_config(pc.sim, std::cout);
    const RunResult rr = run_simulation(pc.sim);
    const Metrics& m = rr.metrics;
    std::cout << "# results\n";
    std::cout << "a_tot = " << format_sig6(m.a_tot) << " m/s^2\n";
    std::cout << "d_tot = " << format_sig6(m.d_tot) << " m/s^2\n";
    std::cout << "t_ave = " << format_sig6(m.t_ave) << " s\n";
    std::cout << "merge_rate = " << format_sig6(m.merge_rate) << " 1/s\n";
    std::cout << "mean_queue_wait = " << format_sig6(m.mean_queue_wait) << " s\n";
    std::cout << "merges = " << m.merges << "\n";
    std::cout << "failures = " << m.failures << "\n";
    std::cout << "spawned = " << rr.spawned_main << "\n";
    std::cout << "despawned = " << rr.despawned << "\n";
    std::cout << "warmup_end = " << format_sig6(rr.warmup_end) << " s\n";
    std::cout << "final_time = " << format_sig6(rr.final_time) << " s\n";
    if (!events_path.empty()) {
        std::ofstream out(events_path);
        if (!out) throw ValidationError("cannot open event log path: " + events_path);
        write_event_log(out, rr.events);
    }
    return 0;
}

int cmd_sweep(const CommonOptions& common, const std::string& var_name,
              std::vector<double> values, std::optional<int> reps, bool paper_scale,
              int workers, const std::string& out_path) {
    ParsedConfig pc = effective_config(common);

    ExperimentPlan plan;
    if (pc.plan) plan = *pc.plan;
    plan.base = pc.sim;
    plan.base_seed = pc.sim.seed;
    if (!var_name.empty()) {
        if (var_name == "tv" || var_name == "T_v") plan.var = SweepVar::t_v;
        else if (var_name == "vmax" || var_name == "v_max") plan.var = SweepVar::v_max;
        else throw ValidationError("--sweep must be tv or vmax, got \"" + var_name + "\"");
        if (values.empty() && !pc.plan) {
            values = plan.var == SweepVar::t_v ? default_t_v_grid() : default_v_max_grid();
        }
    }
    if (!values.empty()) plan.values = values;
    if (plan.values.empty()) {
        plan.values = plan.var == SweepVar::t_v ? default_t_v_grid() : default_v_max_grid();
    }
    if (paper_scale) {
        plan.replications = 25;
        if (!common.t_max) plan.base.t_max = 20000.0;
    }
    if (reps) plan.replications = *reps;
    plan.workers = workers;

    const SweepResult result = run_sweep(plan);
    if (out_path.empty()) {
        write_sweep_csv(std::cout, result);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw ValidationError("cannot open output path: " + out_path);
        write_sweep_csv(out, result);
        std::cerr << "wrote " << result.rows.size() << " data rows to " << out_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"microscopic simulator for on-ramp merging into a high-speed "
                 "dedicated autonomous-vehicle lane"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::string events_path;
    CLI::App* run_cmd = app.add_subcommand("run", "run a single simulation");
    add_common_options(run_cmd, run_opts);
    run_cmd->add_option("--events", events_path, "write the event log to this path");

    CommonOptions sweep_opts;
    std::string sweep_var;
    std::vector<double> sweep_values;
    std::optional<int> sweep_reps;
    bool paper_scale = false;
    int workers = 1;
    std::string out_path;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
    add_common_options(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--sweep", sweep_var, "sweep variable: tv or vmax");
    sweep_cmd->add_option("--values", sweep_values, "explicit sweep values");
    sweep_cmd->add_option("--reps", sweep_reps, "replications per sweep value");
    sweep_cmd->add_flag("--paper-scale", paper_scale,
                        "25 replications of 20000 s (default is 5 x 2000 s)");
    sweep_cmd->add_option("--workers", workers, "concurrent simulation workers");
    sweep_cmd->add_option("--out", out_path, "output CSV path (default stdout)");

    CommonOptions analysis_opts;
    double delta_v = 10.0;
    bool with_oracle = false;
    CLI::App* analysis_cmd =
        app.add_subcommand("analysis", "closed-form controller analysis");
    add_common_options(analysis_cmd, analysis_opts);
    analysis_cmd->add_option("--dv", delta_v, "velocity contrast for the peak, m/s");
    analysis_cmd->add_flag("--oracle", with_oracle,
                           "cross-check the peak with the numerical oracle");

    CommonOptions flow_opts;
    CLI::App* flow_cmd = app.add_subcommand("flow", "analytic mean-flow calculator");
    add_common_options(flow_cmd, flow_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run_opts, events_path);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_opts, sweep_var, sweep_values, sweep_reps, paper_scale,
                             workers, out_path);
        if (analysis_cmd->parsed()) return cmd_analysis(analysis_opts, delta_v, with_oracle);
        if (flow_cmd->parsed()) return cmd_flow(flow_opts);
    } catch (const hovmerge::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const hovmerge::UnderdampedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const hovmerge::CollisionError& e) {
        std::cerr << "simulation fault: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
