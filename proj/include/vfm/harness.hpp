#pragma once

// Experiment engines behind the CLI verbs: single simulations, paired
// Monte-Carlo benches with trial chaining, frequency sweeps, and
// feasibility tables, plus the CSV/summary writers.

#include <optional>
#include <string>
#include <vector>

#include "vfm/scenario.hpp"

namespace vfm {

std::string format_csv_double(double v);  // 9 significant digits

struct EpisodeResult {
    GoalState goal;
    Outcome outcome = Outcome::Fault;
    std::string fault_reason;
    ObjectState final_state;
    double final_pos_err = 0.0;  // m
    double final_ang_err = 0.0;  // rad
    double sim_time = 0.0;       // s
    double wall_time = 0.0;      // s
    double togoal_drift = 0.0;   // rad, |psi change| across the ToGoal phase
    std::vector<PhaseTransition> transitions;
    std::vector<double> phase_time;  // s per phase, indexed by Phase
};

/// One closed-loop episode. Pre-checks slip feasibility at the operating
/// frequencies over the goal/initial radii; Fault with a diagnostic if the
/// scenario cannot slip there.
EpisodeResult run_episode(const Scenario& scenario, const Plant& plant, const GoalState& goal,
                          const ObjectState& initial, std::uint64_t seed,
                          Trajectory* trajectory_out = nullptr);

struct BenchTrialRow {
    int trial = 0;
    std::uint64_t seed = 0;
    GoalState goal;
    Outcome outcome = Outcome::Fault;
    double pos_err_mm = 0.0;
    double ang_err_deg = 0.0;
    double togoal_drift_deg = 0.0;
    double sim_time = 0.0;
    bool within_tolerance = false;
};

struct BenchReport {
    std::string arm;  // "duty" or "continuous"
    double duty_fraction = 0.5;
    std::vector<BenchTrialRow> rows;
    double mean_pos_mm = 0.0, std_pos_mm = 0.0;
    double mean_ang_deg = 0.0, std_ang_deg = 0.0;
    int reached = 0, timeout = 0, fault = 0;
    int within_tolerance = 0;  // both final errors inside (eps_r, eps_psi)
    std::vector<double> mean_phase_time;  // s per phase

    void finalize();  // computes aggregates and re-checks them from the rows
};

/// N chained trials; goals from the scenario spec. duty_override, when set,
/// replaces controller.duty_fraction for this arm.
BenchReport run_bench(const Scenario& scenario, int trials,
                      std::optional<double> duty_override = std::nullopt);

struct PairedBench {
    BenchReport continuous;  // duty_fraction = 1.0
    BenchReport duty;        // scenario duty_fraction
    bool duty_better = false;
    double orientation_ratio = 0.0;  // continuous mean / duty mean
};

PairedBench run_paired_bench(const Scenario& scenario, int trials);

struct SweepRow {
    double omega = 0.0;  // rad/s
    bool feasible = false;
    double analytic_rate = 0.0;   // rad/s
    double simulated_rate = 0.0;  // rad/s
};

/// Steady rotation rate vs drive frequency at the scenario's r_c: analytic
/// sqrt(F_eff/(M r_c)) against the rate measured from a simulated orbit.
std::vector<SweepRow> run_sweep(const Scenario& scenario, const std::vector<double>& omegas,
                                double revolutions = 5.0);

struct FeasibilityRow {
    double r = 0.0;
    double tilt = 0.0;          // N
    double min_frequency = 0.0; // rad/s
    double margin = 0.0;        // N at the scenario's nominal drive frequency
};

std::vector<FeasibilityRow> run_feasibility(const Scenario& scenario, const std::vector<double>& radii);

// --- Emission ---------------------------------------------------------------

void write_trajectory_csv(const std::string& path, const Trajectory& trajectory,
                          double r_origin_epsilon);
void write_bench_csv(const std::string& path, const BenchReport& report);
std::string bench_summary_text(const BenchReport& report);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
void write_feasibility_csv(const std::string& path, const std::vector<FeasibilityRow>& rows);

// --- CLI verbs --------------------------------------------------------------

struct CliOptions {
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    int trials = 1;
    bool paired = false;
    std::vector<double> sweep_hz;     // sweep-freq grid
    std::vector<double> radii;        // feasibility grid (m)
};

int cli_simulate(const CliOptions& opt);
int cli_bench(const CliOptions& opt);
int cli_sweep_frequency(const CliOptions& opt);
int cli_feasibility(const CliOptions& opt);

}  // namespace vfm
