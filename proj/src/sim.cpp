#include "vfm/sim.hpp"

#include <algorithm>
#include <cmath>

namespace vfm {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw Error(ErrorCode::ConfigError, "sim.dt must be > 0");
    if (sensor_pos_noise_std < 0.0 || sensor_ang_noise_std < 0.0)
        throw Error(ErrorCode::ConfigError, "sim sensor noise stds must be >= 0");
    if (perturbation_torque_std < 0.0)
        throw Error(ErrorCode::ConfigError, "sim.perturbation_torque_std must be >= 0");
    if (!(r_origin_epsilon > 0.0))
        throw Error(ErrorCode::ConfigError, "sim.r_origin_epsilon must be > 0");
    if (!(max_sim_time > 0.0)) throw Error(ErrorCode::ConfigError, "sim.max_sim_time must be > 0");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

void Plant::build_table(double omega, double r_max, int nodes) {
    for (auto& t : tables)
        if (t.omega == omega) return;
    ForceTable table;
    table.omega = omega;
    table.r_max = r_max;
    table.force.resize(nodes);
    ErmParams drive = erm.with_frequency(omega);
    for (int i = 0; i < nodes; ++i) {
        double r = r_max * i / (nodes - 1);
        table.force[i] = effective_net_force(drive, contact, geometry, r);
    }
    tables.push_back(std::move(table));
}

double Plant::drive_force(double omega, double r) const {
    for (const auto& t : tables) {
        if (t.omega == omega && r <= t.r_max) {
            double u = r / t.r_max * (t.force.size() - 1);
            std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(u), t.force.size() - 2);
            double w = u - static_cast<double>(i);
            return (1.0 - w) * t.force[i] + w * t.force[i + 1];
        }
    }
    return effective_net_force(erm.with_frequency(omega), contact, geometry, r);
}

bool Plant::drive_feasible(double omega, double r) const {
    return slip_feasible(erm.with_frequency(omega), contact, geometry, r).feasible;
}

bool drive_active(const Plant& plant, const ActuatorCommand& cmd, double r) {
    return cmd.drive_requested() && plant.drive_feasible(cmd.frequency, r);
}

namespace {

// Exact constant-deceleration braking with stop clamping, applied
// independently to the COM velocity and the spin. The rotational moment arm
// is the grasp point's offset r from the COM; torsional friction within the
// contact patch is not modeled, so spin at the exact origin does not decay.
ObjectState brake_step(const ObjectState& s, const Plant& plant, const SimConfig& cfg) {
    ObjectState n = s;
    double dt = cfg.dt;
    double r = s.r();
    double hold = plant.contact.grip_preload + plant.geometry.mass * plant.contact.gravity +
                  tilt_force_at(plant.geometry, plant.contact, r);
    double speed = std::hypot(s.vx, s.vy);
    if (speed > 0.0) {
        double decel = plant.contact.mu_kinetic * hold / plant.geometry.mass;
        double t_stop = speed / decel;
        double ux = s.vx / speed, uy = s.vy / speed;
        if (t_stop <= dt) {
            double dist = 0.5 * speed * t_stop;
            n.x += ux * dist;
            n.y += uy * dist;
            n.vx = 0.0;
            n.vy = 0.0;
        } else {
            double dist = speed * dt - 0.5 * decel * dt * dt;
            n.x += ux * dist;
            n.y += uy * dist;
            n.vx = s.vx - decel * dt * ux;
            n.vy = s.vy - decel * dt * uy;
        }
    }
    if (s.psi_dot != 0.0) {
        double alpha = plant.contact.mu_kinetic * hold * r / plant.geometry.inertia;
        if (alpha > 0.0) {
            double t_stop = std::abs(s.psi_dot) / alpha;
            double sign = s.psi_dot > 0.0 ? 1.0 : -1.0;
            if (t_stop <= dt) {
                n.psi += sign * 0.5 * std::abs(s.psi_dot) * t_stop;
                n.psi_dot = 0.0;
            } else {
                n.psi += s.psi_dot * dt - sign * 0.5 * alpha * dt * dt;
                n.psi_dot = s.psi_dot - sign * alpha * dt;
            }
        } else {
            n.psi += s.psi_dot * dt;
        }
    }
    return n;
}

struct Derivative {
    double dx, dy, dpsi, dvx, dvy, dpsi_dot;
};

// Slip dynamics with the cycle-averaged force magnitude frozen for the step.
// Direction follows the live bearing phi + theta; below the origin epsilon
// the steering angle is interpreted as a world-frame angle and the drive
// torque arm vanishes.
Derivative slip_deriv(const ObjectState& s, double force, double theta, double tau,
                      const Plant& plant, const SimConfig& cfg) {
    double r = s.r();
    double dir = r > cfg.r_origin_epsilon ? std::atan2(s.y, s.x) + theta : theta;
    double ax = force * std::cos(dir) / plant.geometry.mass;
    double ay = force * std::sin(dir) / plant.geometry.mass;
    double torque = (r > cfg.r_origin_epsilon ? r * force * std::sin(theta) : 0.0) + tau;
    return {s.vx, s.vy, s.psi_dot, ax, ay, torque / plant.geometry.inertia};
}

ObjectState advance(const ObjectState& s, const Derivative& d, double h) {
    ObjectState n = s;
    n.x += h * d.dx;
    n.y += h * d.dy;
    n.psi += h * d.dpsi;
    n.vx += h * d.dvx;
    n.vy += h * d.dvy;
    n.psi_dot += h * d.dpsi_dot;
    return n;
}

}  // namespace

ObjectState step(const ObjectState& state, const ActuatorCommand& cmd, const Plant& plant,
                 const SimConfig& cfg, Rng& rng) {
    ObjectState next;
    if (!drive_active(plant, cmd, state.r())) {
        next = brake_step(state, plant, cfg);
    } else {
        double force = plant.drive_force(cmd.frequency, state.r());
        double tau = rng.gauss(cfg.perturbation_torque_std);
        double h = cfg.dt;
        Derivative k1 = slip_deriv(state, force, cmd.steering_angle, tau, plant, cfg);
        Derivative k2 = slip_deriv(advance(state, k1, h / 2.0), force, cmd.steering_angle, tau, plant, cfg);
        Derivative k3 = slip_deriv(advance(state, k2, h / 2.0), force, cmd.steering_angle, tau, plant, cfg);
        Derivative k4 = slip_deriv(advance(state, k3, h), force, cmd.steering_angle, tau, plant, cfg);
        next = state;
        next.x += h / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
        next.y += h / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
        next.psi += h / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
        next.vx += h / 6.0 * (k1.dvx + 2.0 * k2.dvx + 2.0 * k3.dvx + k4.dvx);
        next.vy += h / 6.0 * (k1.dvy + 2.0 * k2.dvy + 2.0 * k3.dvy + k4.dvy);
        next.psi_dot += h / 6.0 * (k1.dpsi_dot + 2.0 * k2.dpsi_dot + 2.0 * k3.dpsi_dot + k4.dpsi_dot);
    }
    if (!next.finite()) throw Error(ErrorCode::NonFiniteState, "integration produced non-finite state");
    return next;
}

ObjectState sense(const ObjectState& state, const SimConfig& cfg, Rng& rng) {
    ObjectState m = state;
    m.vx = 0.0;
    m.vy = 0.0;
    m.psi_dot = 0.0;
    m.x += rng.gauss(cfg.sensor_pos_noise_std);
    m.y += rng.gauss(cfg.sensor_pos_noise_std);
    m.psi += rng.gauss(cfg.sensor_ang_noise_std);
    return m;
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Reached: return "Reached";
        case Outcome::Timeout: return "Timeout";
        case Outcome::Fault: return "Fault";
    }
    return "Unknown";
}

}  // namespace vfm
