#pragma once

// Full-state manipulation: position steering law, duty gating, and the
// phase machine that moves the object to the COM, spins it to the goal
// orientation with a kicked constant-radius rotation, then translates it
// through the COM line to the goal position.

#include <vector>

#include "vfm/sim.hpp"
#include "vfm/state.hpp"

namespace vfm {

struct GoalState {
    double r_g = 0.0;    // m
    double phi_g = 0.0;  // rad, normalized to (-pi, pi]
    double psi_g = 0.0;  // rad, normalized to (-pi, pi]

    void validate() const;
};

struct ControllerParams {
    double eps_r = 1e-3;               // m
    double eps_psi = deg_to_rad(1.0);  // rad
    double r_c = 7.75e-3;              // m, rotation radius
    double theta_kick = pi / 5.0;      // rad, spin-up steering angle
    double kick_duration = 0.1;        // s
    double omega_rotate = hz_to_rad(168.0);     // rad/s
    double omega_translate = hz_to_rad(240.0);  // rad/s
    double duty_fraction = 0.5;   // of duty_period with the gate open
    double duty_period = 0.05;    // s
    double settle_time = 0.15;    // s, halt held after translation phases
    int settle_retries = 6;       // re-drives allowed after a failed settled recheck
    double origin_radius = 2e-4;  // m, matches sim.r_origin_epsilon
    double phase_budget_translate = 120.0;  // s
    double phase_budget_rotate = 240.0;     // s
    double phase_budget_other = 30.0;       // s

    void validate() const;
};

enum class Phase { ToCom, SpinUpRadius, Kick, Rotate, ReturnToCom, DepartOrigin, ToGoal, Done };
const char* phase_name(Phase p);

struct PhaseTransition {
    double t = 0.0;
    Phase from = Phase::ToCom;
    Phase to = Phase::ToCom;
};

struct ControlOutput {
    ActuatorCommand cmd;
    Phase phase = Phase::ToCom;
    bool done = false;
    const char* phase_label() const { return phase_name(phase); }
};

// --- Stateless control laws ---------------------------------------------

/// Position steering law: theta = atan2(k2, k1) - phi with k the world-frame
/// offset from the measured position to the target, normalized to (-pi, pi].
/// Throws DegenerateTarget when the measured position equals the target.
double position_steering(const ObjectState& measured, double target_r, double target_phi);

/// Duty gate: open iff (t mod duty_period) < duty_fraction * duty_period.
bool duty_gate(double t, const ControllerParams& params);

/// Constant-radius steering rule theta = atan2(-phi_ddot, phi_dot^2).
/// Analysis helper; throws ZeroAngularVelocity when phi_dot = 0.
double required_steering_for_circle(double phi_dot, double phi_ddot);

/// Steady rotation rate sqrt(F_eff / (M r_c)) for a constant-radius orbit
/// driven inward (theta = pi) at the given frequency.
/// Throws Infeasible when the effective force vanishes.
double steady_spin_rate(double r_c, const Plant& plant, double omega);

// --- Phase machine --------------------------------------------------------

class Controller {
  public:
    Controller(GoalState goal, ControllerParams params);

    /// One tick: cascades any phase transitions whose exit conditions hold
    /// (emitting a single halt command for the boundary), otherwise emits the
    /// active phase's drive command. Throws PhaseTimeout past the budget.
    ControlOutput update(const ObjectState& measured, double t);

    Phase phase() const { return phase_; }
    const std::vector<PhaseTransition>& transitions() const { return transitions_; }
    const GoalState& goal() const { return goal_; }

  private:
    bool exit_condition(const ObjectState& measured, double t) const;
    bool rotate_overshot(const ObjectState& measured) const;
    Phase next_phase(const ObjectState& measured) const;
    void enter(Phase p, const ObjectState& measured, double t);
    void transition(Phase to, const ObjectState& measured, double t);
    ActuatorCommand phase_command(const ObjectState& measured, double t) const;
    double phase_budget(Phase p) const;
    bool settles_before_exit(Phase p) const;

    GoalState goal_;
    ControllerParams params_;
    Phase phase_ = Phase::ToCom;
    bool settling_ = false;
    double phase_entry_t_ = 0.0;
    double settle_until_t_ = 0.0;
    double kick_end_t_ = 0.0;
    double rotation_sign_ = 1.0;
    double last_phi_ = 0.0;
    int overshoot_ticks_ = 0;
    int retries_left_ = 0;
    std::vector<PhaseTransition> transitions_;
};

}  // namespace vfm
