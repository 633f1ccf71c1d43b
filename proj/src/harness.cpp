#include "vfm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace vfm {

std::string format_csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

namespace {

Scenario load_cli_scenario(const CliOptions& opt) {
    Scenario s = Scenario::load_file(opt.scenario_path, opt.overrides);
    if (opt.seed) {
        s.sim.rng_seed = *opt.seed;
        s.overrides.push_back("sim.rng_seed=" + std::to_string(*opt.seed));
    }
    return s;
}

constexpr int phase_count = 8;

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, const Plant& plant, const GoalState& goal,
                          const ObjectState& initial, std::uint64_t seed, Trajectory* trajectory_out) {
    EpisodeResult out;
    out.goal = goal;
    out.phase_time.assign(phase_count, 0.0);

    SimConfig cfg = scenario.sim;
    cfg.rng_seed = seed;
    Controller controller(goal, scenario.controller);

    FeasibilityChecks checks = {
        {scenario.controller.omega_rotate, scenario.controller.r_c},
        {scenario.controller.omega_translate, goal.r_g},
        {scenario.controller.omega_translate, initial.r()},
    };

    auto t0 = std::chrono::steady_clock::now();
    RunResult run_result = run(controller, initial, plant, cfg, checks);
    auto t1 = std::chrono::steady_clock::now();

    out.wall_time = std::chrono::duration<double>(t1 - t0).count();
    out.outcome = run_result.outcome;
    out.fault_reason = run_result.fault_reason;
    out.final_state = run_result.final_state;
    out.sim_time = run_result.sim_time;
    out.transitions = controller.transitions();

    double gx = goal.r_g * std::cos(goal.phi_g);
    double gy = goal.r_g * std::sin(goal.phi_g);
    out.final_pos_err = std::hypot(run_result.final_state.x - gx, run_result.final_state.y - gy);
    out.final_ang_err = std::abs(wrap_pi(run_result.final_state.psi - goal.psi_g));

    const auto& samples = run_result.trajectory.samples;
    bool in_togoal = false;
    double psi_at_togoal_entry = 0.0, psi_at_togoal_exit = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        int p = 0;
        if (samples[i].phase == "ToCom") p = 0;
        else if (samples[i].phase == "SpinUpRadius") p = 1;
        else if (samples[i].phase == "Kick") p = 2;
        else if (samples[i].phase == "Rotate") p = 3;
        else if (samples[i].phase == "ReturnToCom") p = 4;
        else if (samples[i].phase == "DepartOrigin") p = 5;
        else if (samples[i].phase == "ToGoal") p = 6;
        else p = 7;
        out.phase_time[p] += run_result.trajectory.dt;
        if (samples[i].phase == "ToGoal") {
            if (!in_togoal) {
                in_togoal = true;
                psi_at_togoal_entry = samples[i].truth.psi;
            }
            psi_at_togoal_exit = samples[i].truth.psi;
        }
    }
    if (in_togoal) out.togoal_drift = std::abs(wrap_pi(psi_at_togoal_exit - psi_at_togoal_entry));

    if (trajectory_out) *trajectory_out = std::move(run_result.trajectory);
    return out;
}

void BenchReport::finalize() {
    double sp = 0.0, sa = 0.0;
    reached = timeout = fault = within_tolerance = 0;
    mean_phase_time.assign(phase_count, 0.0);
    for (const auto& row : rows) {
        sp += row.pos_err_mm;
        sa += row.ang_err_deg;
        switch (row.outcome) {
            case Outcome::Reached: ++reached; break;
            case Outcome::Timeout: ++timeout; break;
            case Outcome::Fault: ++fault; break;
        }
        if (row.within_tolerance) ++within_tolerance;
    }
    size_t n = rows.size();
    mean_pos_mm = n ? sp / n : 0.0;
    mean_ang_deg = n ? sa / n : 0.0;
    double vp = 0.0, va = 0.0;
    for (const auto& row : rows) {
        vp += (row.pos_err_mm - mean_pos_mm) * (row.pos_err_mm - mean_pos_mm);
        va += (row.ang_err_deg - mean_ang_deg) * (row.ang_err_deg - mean_ang_deg);
    }
    std_pos_mm = n > 1 ? std::sqrt(vp / (n - 1)) : 0.0;
    std_ang_deg = n > 1 ? std::sqrt(va / (n - 1)) : 0.0;

    // Aggregates must be recomputable from the per-trial rows.
    double check_p = 0.0, check_a = 0.0;
    for (const auto& row : rows) {
        check_p += row.pos_err_mm;
        check_a += row.ang_err_deg;
    }
    if (n && (std::abs(check_p / n - mean_pos_mm) > 1e-12 || std::abs(check_a / n - mean_ang_deg) > 1e-12))
        throw Error(ErrorCode::ConfigError, "bench report aggregates do not match the rows");
}

namespace {

BenchReport bench_arm(const Scenario& base, int trials, double duty_fraction, const char* arm_name,
                      std::vector<double>* tolerance_counts) {
    Scenario scenario = base;
    scenario.controller.duty_fraction = duty_fraction;
    Plant plant = scenario.make_plant();
    std::vector<GoalState> goals = scenario.materialize_goals(trials);

    BenchReport report;
    report.arm = arm_name;
    report.duty_fraction = duty_fraction;
    report.mean_phase_time.assign(phase_count, 0.0);

    ObjectState initial = scenario.initial;
    std::vector<double> phase_accum(phase_count, 0.0);
    for (int i = 0; i < static_cast<int>(goals.size()); ++i) {
        std::uint64_t seed = mix_seed(scenario.sim.rng_seed, static_cast<std::uint64_t>(i));
        EpisodeResult ep = run_episode(scenario, plant, goals[i], initial, seed);
        BenchTrialRow row;
        row.trial = i;
        row.seed = seed;
        row.goal = goals[i];
        row.outcome = ep.outcome;
        row.pos_err_mm = ep.final_pos_err * 1e3;
        row.ang_err_deg = rad_to_deg(ep.final_ang_err);
        row.togoal_drift_deg = rad_to_deg(ep.togoal_drift);
        row.sim_time = ep.sim_time;
        row.within_tolerance = ep.final_pos_err <= scenario.controller.eps_r &&
                               ep.final_ang_err <= scenario.controller.eps_psi;
        report.rows.push_back(row);
        for (int p = 0; p < phase_count; ++p) phase_accum[p] += ep.phase_time[p];

        // Trials chain from the previous endpoint; faults restart from the
        // scenario's nominal initial state.
        if (ep.outcome == Outcome::Reached || ep.outcome == Outcome::Timeout) {
            initial = ep.final_state;
            initial.vx = initial.vy = initial.psi_dot = 0.0;
        } else {
            initial = scenario.initial;
        }
    }
    report.finalize();
    for (int p = 0; p < phase_count; ++p)
        report.mean_phase_time[p] = goals.empty() ? 0.0 : phase_accum[p] / goals.size();
    if (tolerance_counts) tolerance_counts->push_back(report.within_tolerance);
    return report;
}

}  // namespace

BenchReport run_bench(const Scenario& scenario, int trials, std::optional<double> duty_override) {
    double duty = duty_override.value_or(scenario.controller.duty_fraction);
    return bench_arm(scenario, trials, duty, duty >= 1.0 ? "continuous" : "duty", nullptr);
}

PairedBench run_paired_bench(const Scenario& scenario, int trials) {
    PairedBench out;
    out.continuous = bench_arm(scenario, trials, 1.0, "continuous", nullptr);
    out.duty = bench_arm(scenario, trials, scenario.controller.duty_fraction, "duty", nullptr);
    out.duty_better = out.duty.mean_ang_deg < out.continuous.mean_ang_deg;
    out.orientation_ratio = out.duty.mean_ang_deg > 0.0
                                ? out.continuous.mean_ang_deg / out.duty.mean_ang_deg
                                : std::numeric_limits<double>::infinity();
    return out;
}

std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::vector<double>& omegas,
                                double revolutions) {
    std::vector<SweepRow> rows;
    Plant plant = scenario.make_plant(false);
    double r_c = scenario.controller.r_c;

    SimConfig cfg = scenario.sim;
    cfg.sensor_pos_noise_std = 0.0;
    cfg.sensor_ang_noise_std = 0.0;
    cfg.perturbation_torque_std = 0.0;

    for (double omega : omegas) {
        SweepRow row;
        row.omega = omega;
        row.feasible = plant.drive_feasible(omega, r_c);
        if (row.feasible) {
            row.analytic_rate = steady_spin_rate(r_c, plant, omega);
            // Start exactly on the circular orbit and hold theta = pi.
            ObjectState state;
            state.x = r_c;
            state.y = 0.0;
            state.vx = 0.0;
            state.vy = r_c * row.analytic_rate;
            ActuatorCommand cmd;
            cmd.steering_angle = pi;
            cmd.frequency = omega;
            cmd.duty_gate_open = true;
            Rng rng(cfg.rng_seed);
            double total_angle = 0.0;
            double prev_phi = 0.0;
            double t = 0.0;
            double skip = two_pi / row.analytic_rate;  // one revolution of transient
            double t_skip = -1.0;
            double angle_at_skip = 0.0;
            while (total_angle < (revolutions + 1.0) * two_pi) {
                state = step(state, cmd, plant, cfg, rng);
                t += cfg.dt;
                double phi = std::atan2(state.y, state.x);
                total_angle += wrap_pi(phi - prev_phi);
                prev_phi = phi;
                if (t_skip < 0.0 && t >= skip) {
                    t_skip = t;
                    angle_at_skip = total_angle;
                }
                if (t > cfg.max_sim_time) break;
            }
            if (t_skip > 0.0 && t > t_skip)
                row.simulated_rate = (total_angle - angle_at_skip) / (t - t_skip);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<FeasibilityRow> run_feasibility(const Scenario& scenario, const std::vector<double>& radii) {
    std::vector<FeasibilityRow> rows;
    for (double r : radii) {
        FeasibilityRow row;
        row.r = r;
        row.tilt = tilt_force_at(scenario.object, scenario.contact, r);
        row.min_frequency = min_slip_frequency(scenario.erm, scenario.contact, scenario.object, r);
        row.margin = slip_feasible(scenario.erm, scenario.contact, scenario.object, r).margin;
        rows.push_back(row);
    }
    return rows;
}

// --- Emission ----------------------------------------------------------------

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory,
                          double r_origin_epsilon) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
    out << "t,x,y,psi,r,phi,meas_x,meas_y,meas_psi,theta,omega,gate,slip,phase\n";
    for (const auto& s : trajectory.samples) {
        double r = s.truth.r();
        double phi = r > r_origin_epsilon ? std::atan2(s.truth.y, s.truth.x)
                                          : std::numeric_limits<double>::quiet_NaN();
        out << format_csv_double(s.t) << ',' << format_csv_double(s.truth.x) << ','
            << format_csv_double(s.truth.y) << ',' << format_csv_double(s.truth.psi) << ','
            << format_csv_double(r) << ',' << format_csv_double(phi) << ','
            << format_csv_double(s.measured.x) << ',' << format_csv_double(s.measured.y) << ','
            << format_csv_double(s.measured.psi) << ',' << format_csv_double(s.cmd.steering_angle)
            << ',' << format_csv_double(s.cmd.frequency) << ',' << (s.cmd.duty_gate_open ? 1 : 0)
            << ',' << (s.slip ? 1 : 0) << ',' << s.phase << '\n';
    }
}

void write_bench_csv(const std::string& path, const BenchReport& report) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
    out << "trial,seed,goal_r,goal_phi,goal_psi,outcome,pos_err_mm,ang_err_deg,togoal_drift_deg,sim_time\n";
    for (const auto& r : report.rows) {
        out << r.trial << ',' << r.seed << ',' << format_csv_double(r.goal.r_g) << ','
            << format_csv_double(r.goal.phi_g) << ',' << format_csv_double(r.goal.psi_g) << ','
            << outcome_name(r.outcome) << ',' << format_csv_double(r.pos_err_mm) << ','
            << format_csv_double(r.ang_err_deg) << ',' << format_csv_double(r.togoal_drift_deg)
            << ',' << format_csv_double(r.sim_time) << '\n';
    }
}

std::string bench_summary_text(const BenchReport& report) {
    std::ostringstream out;
    out << "arm = " << report.arm << "\n";
    out << "duty_fraction = " << format_csv_double(report.duty_fraction) << "\n";
    out << "trials = " << report.rows.size() << "\n";
    out << "mean_pos_err_mm = " << format_csv_double(report.mean_pos_mm) << "\n";
    out << "std_pos_err_mm = " << format_csv_double(report.std_pos_mm) << "\n";
    out << "mean_ang_err_deg = " << format_csv_double(report.mean_ang_deg) << "\n";
    out << "std_ang_err_deg = " << format_csv_double(report.std_ang_deg) << "\n";
    out << "reached = " << report.reached << "\n";
    out << "timeout = " << report.timeout << "\n";
    out << "fault = " << report.fault << "\n";
    out << "within_tolerance = " << report.within_tolerance << "\n";
    static const char* names[phase_count] = {"ToCom", "SpinUpRadius", "Kick", "Rotate",
                                             "ReturnToCom", "DepartOrigin", "ToGoal", "Done"};
    for (int p = 0; p < phase_count; ++p)
        out << "mean_phase_time." << names[p] << " = "
            << format_csv_double(report.mean_phase_time[p]) << "\n";
    return out.str();
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
    out << "omega_hz,feasible,analytic_rate,simulated_rate\n";
    for (const auto& r : rows) {
        out << format_csv_double(r.omega / two_pi) << ',' << (r.feasible ? 1 : 0) << ',';
        if (r.feasible)
            out << format_csv_double(r.analytic_rate) << ',' << format_csv_double(r.simulated_rate);
        else
            out << ',';
        out << '\n';
    }
}

void write_feasibility_csv(const std::string& path, const std::vector<FeasibilityRow>& rows) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
    out << "r,tilt_force,min_frequency_hz,margin\n";
    for (const auto& r : rows) {
        out << format_csv_double(r.r) << ',' << format_csv_double(r.tilt) << ','
            << format_csv_double(r.min_frequency / two_pi) << ',' << format_csv_double(r.margin)
            << '\n';
    }
}

// --- CLI verbs ----------------------------------------------------------------

namespace {

int guarded(const CliOptions& opt, int (*body)(const CliOptions&, const Scenario&)) {
    try {
        Scenario scenario = load_cli_scenario(opt);
        std::filesystem::create_directories(opt.out_dir);
        return body(opt, scenario);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        std::cerr << "fault: " << e.what() << "\n";
        return 3;
    }
}

void write_summary_file(const std::string& path, const std::string& body,
                        const Scenario& scenario) {
    std::ofstream out(path);
    out << body;
    for (size_t i = 0; i < scenario.overrides.size(); ++i)
        out << "override." << i << " = " << scenario.overrides[i] << "\n";
}

}  // namespace

int cli_simulate(const CliOptions& opt) {
    return guarded(opt, [](const CliOptions& o, const Scenario& scenario) {
        Plant plant = scenario.make_plant();
        std::vector<GoalState> goals = scenario.materialize_goals();
        ObjectState initial = scenario.initial;
        bool all_reached = true;
        std::ostringstream summary;
        summary << "scenario = " << scenario.name << "\n";
        for (int i = 0; i < static_cast<int>(goals.size()); ++i) {
            std::uint64_t seed = mix_seed(scenario.sim.rng_seed, static_cast<std::uint64_t>(i));
            Trajectory trajectory;
            EpisodeResult ep = run_episode(scenario, plant, goals[i], initial, seed, &trajectory);
            std::string traj_path =
                o.out_dir + "/trajectory_" + std::to_string(i) + ".csv";
            write_trajectory_csv(traj_path, trajectory, scenario.sim.r_origin_epsilon);
            std::string p = "episode." + std::to_string(i) + ".";
            summary << p << "outcome = " << outcome_name(ep.outcome) << "\n";
            summary << p << "pos_err_mm = " << format_csv_double(ep.final_pos_err * 1e3) << "\n";
            summary << p << "ang_err_deg = " << format_csv_double(rad_to_deg(ep.final_ang_err)) << "\n";
            summary << p << "sim_time = " << format_csv_double(ep.sim_time) << "\n";
            summary << p << "wall_time = " << format_csv_double(ep.wall_time) << "\n";
            if (!ep.fault_reason.empty()) summary << p << "fault = " << ep.fault_reason << "\n";
            for (const auto& tr : ep.transitions)
                summary << p << "transition = {t=" << format_csv_double(tr.t) << ", from="
                        << phase_name(tr.from) << ", to=" << phase_name(tr.to) << "}\n";
            if (ep.outcome != Outcome::Reached) all_reached = false;
            if (ep.outcome == Outcome::Reached || ep.outcome == Outcome::Timeout) {
                initial = ep.final_state;
                initial.vx = initial.vy = initial.psi_dot = 0.0;
            }
        }
        write_summary_file(o.out_dir + "/summary.txt", summary.str(), scenario);
        std::cout << summary.str();
        return all_reached ? 0 : 3;
    });
}

int cli_bench(const CliOptions& opt) {
    return guarded(opt, [](const CliOptions& o, const Scenario& scenario) {
        if (o.paired) {
            PairedBench pb = run_paired_bench(scenario, o.trials);
            write_bench_csv(o.out_dir + "/trials_continuous.csv", pb.continuous);
            write_bench_csv(o.out_dir + "/trials_duty.csv", pb.duty);
            std::ostringstream summary;
            summary << "paired = true\n";
            summary << "# continuous arm\n" << bench_summary_text(pb.continuous);
            summary << "# duty arm\n" << bench_summary_text(pb.duty);
            summary << "duty_better = " << (pb.duty_better ? "true" : "false") << "\n";
            summary << "orientation_ratio = " << format_csv_double(pb.orientation_ratio) << "\n";
            write_summary_file(o.out_dir + "/report.txt", summary.str(), scenario);
            std::cout << summary.str();
            return pb.duty_better ? 0 : 4;
        }
        BenchReport report = run_bench(scenario, o.trials);
        write_bench_csv(o.out_dir + "/trials.csv", report);
        write_summary_file(o.out_dir + "/report.txt", bench_summary_text(report), scenario);
        std::cout << bench_summary_text(report);
        return 0;
    });
}

int cli_sweep_frequency(const CliOptions& opt) {
    return guarded(opt, [](const CliOptions& o, const Scenario& scenario) {
        std::vector<double> omegas;
        for (double hz : o.sweep_hz) omegas.push_back(hz_to_rad(hz));
        auto rows = run_sweep(scenario, omegas);
        write_sweep_csv(o.out_dir + "/sweep.csv", rows);
        for (const auto& r : rows)
            std::cout << format_csv_double(r.omega / two_pi) << " Hz: "
                      << (r.feasible ? "analytic " + format_csv_double(r.analytic_rate) +
                                           " rad/s, simulated " + format_csv_double(r.simulated_rate) +
                                           " rad/s"
                                     : std::string("infeasible"))
                      << "\n";
        return 0;
    });
}

int cli_feasibility(const CliOptions& opt) {
    return guarded(opt, [](const CliOptions& o, const Scenario& scenario) {
        auto rows = run_feasibility(scenario, o.radii);
        write_feasibility_csv(o.out_dir + "/feasibility.csv", rows);
        for (const auto& r : rows)
            std::cout << format_csv_double(r.r * 1e3) << " mm: f_d "
                      << format_csv_double(r.tilt) << " N, min freq "
                      << format_csv_double(r.min_frequency / two_pi) << " Hz, margin "
                      << format_csv_double(r.margin) << " N\n";
        return 0;
    });
}

}  // namespace vfm
