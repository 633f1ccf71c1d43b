#pragma once

#include "vfm/units.hpp"

namespace vfm {

/// Full kinematic state of the grasped object's COM in the gripper frame O,
/// kept Cartesian; the polar form is a view (the polar equations of motion
/// are singular at r = 0, which the maneuver deliberately visits).
struct ObjectState {
    double x = 0.0;    // m
    double y = 0.0;    // m
    double psi = 0.0;  // rad, body orientation
    double vx = 0.0;   // m/s
    double vy = 0.0;   // m/s
    double psi_dot = 0.0;  // rad/s

    double r() const { return std::hypot(x, y); }
    bool finite() const;
};

/// Polar view (r, phi, r_dot, phi_dot) of a Cartesian state.
struct PolarView {
    double r = 0.0;
    double phi = 0.0;
    double r_dot = 0.0;
    double phi_dot = 0.0;
};

/// Throws OriginSingularity when r <= origin_epsilon (phi undefined).
PolarView polar_view(const ObjectState& state, double origin_epsilon = 0.0);

/// One actuator command: steering angle relative to r-hat (world-frame angle
/// when the object sits inside the origin epsilon), commanded vibration
/// frequency, and the duty-gate state for this tick.
struct ActuatorCommand {
    double steering_angle = 0.0;  // rad, normalized to (-pi, pi]
    double frequency = 0.0;       // rad/s, 0 = off
    bool duty_gate_open = false;

    static ActuatorCommand halt() { return ActuatorCommand{}; }
    bool drive_requested() const { return frequency > 0.0 && duty_gate_open; }
};

}  // namespace vfm
