#pragma once

// Hybrid plant: slip-driven rigid-body motion under a steered cycle-averaged
// vibration force, with friction braking whenever the drive is off, gated
// off, or infeasible at the current radius.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vfm/model.hpp"
#include "vfm/state.hpp"

namespace vfm {

struct SimConfig {
    double dt = 1e-3;                    // s
    double sensor_pos_noise_std = 1.5e-3;  // m
    double sensor_ang_noise_std = deg_to_rad(1.0);  // rad
    double perturbation_torque_std = 0.0;  // N m, applied only while slipping
    std::uint64_t rng_seed = 1;
    double sensor_rate = 60.0;       // Hz, marker-tracker frame rate (0 = every tick)
    double r_origin_epsilon = 2e-4;  // m, below this phi is taken from the command
    double max_sim_time = 120.0;     // s

    void validate() const;
};

/// Deterministic Gaussian stream. A zero std returns 0 without consuming
/// randomness, so disabling a noise source does not shift the others.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double gauss(double std_dev) {
        if (std_dev <= 0.0) return 0.0;
        std::normal_distribution<double> dist(0.0, std_dev);
        return dist(engine_);
    }

  private:
    std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Plant parameter bundle plus optional effective-force lookup tables.
/// Tables are an evaluation cache for the commanded frequencies; lookups at
/// frequencies without a table fall back to direct quadrature.
struct Plant {
    ObjectGeometry geometry;
    ErmParams erm;  // eccentric mass and link length; frequency comes from commands
    ContactParams contact;

    struct ForceTable {
        double omega = 0.0;
        double r_max = 0.0;
        std::vector<double> force;  // uniform in r over [0, r_max]
    };
    std::vector<ForceTable> tables;

    void build_table(double omega, double r_max, int nodes = 1025);
    double drive_force(double omega, double r) const;
    bool drive_feasible(double omega, double r) const;
};

/// True when this command actually drives the object at radius r.
bool drive_active(const Plant& plant, const ActuatorCommand& cmd, double r);

/// Advance one step: RK4 on the slip dynamics when driving, closed-form
/// friction braking (with exact stop clamping) otherwise.
/// Throws NonFiniteState if integration produces non-finite values.
ObjectState step(const ObjectState& state, const ActuatorCommand& cmd, const Plant& plant,
                 const SimConfig& cfg, Rng& rng);

/// Pose measurement with independent Gaussian noise; velocities are not
/// sensed and come back zeroed.
ObjectState sense(const ObjectState& state, const SimConfig& cfg, Rng& rng);

enum class Outcome { Reached, Timeout, Fault };
const char* outcome_name(Outcome o);

struct TrajectorySample {
    double t = 0.0;
    ObjectState truth;
    ObjectState measured;
    ActuatorCommand cmd;
    bool slip = false;
    std::string phase;
};

struct Trajectory {
    double dt = 0.0;
    std::vector<TrajectorySample> samples;
};

struct RunResult {
    Trajectory trajectory;
    Outcome outcome = Outcome::Fault;
    std::string fault_reason;
    ObjectState final_state;
    double sim_time = 0.0;
};

/// Feasibility requirements checked before a closed-loop run: pairs of
/// (drive frequency, radius) that must admit slip.
using FeasibilityChecks = std::vector<std::pair<double, double>>;

namespace detail {
struct RestTracker {
    int done_steps = 0;
    bool resting(const ObjectState& s) const {
        return std::abs(s.vx) < 1e-9 && std::abs(s.vy) < 1e-9 && std::abs(s.psi_dot) < 1e-7;
    }
};
}  // namespace detail

/// Closed loop: sense -> policy -> plant step at period dt until the policy
/// reports done (then coast to rest under the halt command) or time runs out.
/// Policy contract: Output update(const ObjectState& measured, double t) with
/// members cmd / phase_label() / done.
template <typename Policy>
RunResult run(Policy& policy, const ObjectState& initial, const Plant& plant, const SimConfig& cfg,
              const FeasibilityChecks& checks = {}) {
    RunResult result;
    result.trajectory.dt = cfg.dt;
    for (const auto& [omega, radius] : checks) {
        if (!plant.drive_feasible(omega, radius)) {
            result.outcome = Outcome::Fault;
            result.fault_reason = "Infeasible: no slip at omega=" + std::to_string(omega / two_pi) +
                                  " Hz, r=" + std::to_string(radius * 1e3) + " mm";
            result.final_state = initial;
            return result;
        }
    }

    Rng rng(cfg.rng_seed);
    ObjectState state = initial;
    detail::RestTracker rest;
    const double settle_budget = 2.0;
    double done_since = -1.0;
    // Measurements refresh at the tracker frame rate and hold in between.
    std::int64_t frame_interval = 1;
    if (cfg.sensor_rate > 0.0)
        frame_interval = std::max<std::int64_t>(1, std::llround(1.0 / (cfg.sensor_rate * cfg.dt)));
    ObjectState measured;
    try {
        for (std::int64_t k = 0;; ++k) {
            double t = k * cfg.dt;
            if (t > cfg.max_sim_time) {
                result.outcome = Outcome::Timeout;
                break;
            }
            if (k % frame_interval == 0) measured = sense(state, cfg, rng);
            auto out = policy.update(measured, t);
            bool slip = drive_active(plant, out.cmd, state.r());
            result.trajectory.samples.push_back({t, state, measured, out.cmd, slip, out.phase_label()});
            if (out.done) {
                if (done_since < 0.0) done_since = t;
                if (rest.resting(state) || t - done_since > settle_budget) {
                    result.outcome = Outcome::Reached;
                    break;
                }
            }
            state = step(state, out.cmd, plant, cfg, rng);
            result.sim_time = t + cfg.dt;
        }
    } catch (const Error& e) {
        result.outcome = Outcome::Fault;
        result.fault_reason = e.what();
    }
    result.final_state = state;
    return result;
}

}  // namespace vfm
