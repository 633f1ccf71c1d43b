#pragma once

// Stick-slip force model for a thin object grasped by a vibrating finger.
// Pure functions only; all angles in rad, SI units throughout.

#include "vfm/units.hpp"

namespace vfm {

/// Eccentric rotating mass parameters. drive_frequency is angular (rad/s).
struct ErmParams {
    double eccentric_mass = 0.8e-3;  // kg
    double link_length = 3.0e-3;     // m
    double drive_frequency = 0.0;    // rad/s

    ErmParams with_frequency(double omega) const {
        ErmParams e = *this;
        e.drive_frequency = omega;
        return e;
    }
    void validate() const;
};

struct ContactParams {
    double mu_static = 0.30;
    double mu_kinetic = 0.27;
    double grip_preload = 7.0;    // N, f_b
    double finger_radius = 10e-3; // m, r_d
    double gravity = 9.81;        // m/s^2

    void validate() const;
};

enum class ShapeKind { Disk, Rectangle, PointMass };

struct ObjectGeometry {
    ShapeKind shape = ShapeKind::Disk;
    double radius = 0.1;   // m, Disk only
    double width = 0.0;    // m, Rectangle only (split-plane x extent)
    double height = 0.0;   // m, Rectangle only
    double mass = 0.05;    // kg
    double inertia = 2.5e-4;  // kg m^2, about COM, axis normal to the plate
    double thickness = 0.0;   // m, metadata only

    static ObjectGeometry disk(double radius, double mass, double inertia, double thickness = 0.0);
    static ObjectGeometry rectangle(double width, double height, double mass, double inertia,
                                    double thickness = 0.0);
    static ObjectGeometry point_mass(double mass, double inertia);

    /// Uniform-plate inertia for this shape; PointMass has no closed form.
    double plate_inertia() const;
    /// True if (r, phi_grip) lies inside the footprint. phi_grip is the
    /// body-frame bearing of the COM as seen from the grasp point.
    bool grasp_inside(double r, double phi_grip) const;
    /// Largest grasp distance admissible at every bearing (inscribed circle).
    double max_grasp_radius() const;
    void validate(bool inertia_overridden = false) const;
};

/// Two-sided mass partition about the line through the grasp point
/// perpendicular to the grasp-COM axis. Side 1 contains the COM.
struct MassSplit {
    double m1 = 0.0;  // kg, heavy side
    double r1 = 0.0;  // m, its COM distance from the dividing line
    double m2 = 0.0;  // kg
    double r2 = 0.0;  // m
};

// --- Vibration forces -------------------------------------------------------

/// Tangential drive force m*l*w^2*cos(w t).
double vibration_tangential_force(const ErmParams& erm, double t);

/// Normal vibration force m*l*w^2*sin(w t).
double vibration_normal_force(const ErmParams& erm, double t);

// --- Tilt couple ------------------------------------------------------------

/// Partition the object about the grasp point at distance r from the COM.
/// phi_grip: bearing of the grasp point from the COM, in the body frame.
/// Throws GraspOutsideObject when the grasp point leaves the footprint.
MassSplit mass_split(const ObjectGeometry& geometry, double r, double phi_grip);

/// Tilt-balancing force f_d = g*(m1*r1 - m2*r2)/r_d, always >= 0.
double tilt_force(const MassSplit& split, const ContactParams& contact);

/// Tilt force at grasp distance r. Equals g*M*r/r_d for any geometry since
/// m1*r1 - m2*r2 is the first moment of the whole object about the dividing
/// line; the split route exists for geometry-level checks.
double tilt_force_at(const ObjectGeometry& geometry, const ContactParams& contact, double r);

// --- Normal force and slip gating -------------------------------------------

/// f_N(t) = f_b + f_n(t) + M*g + f_d(r).
double net_normal_force(const ErmParams& erm, const ContactParams& contact,
                        const ObjectGeometry& geometry, double r, double t);

/// Instantaneous slip condition |f_v| > mu_s*|f_N|.
bool slip_active(const ErmParams& erm, const ContactParams& contact,
                 const ObjectGeometry& geometry, double r, double t);

struct SlipFeasibility {
    bool feasible = false;
    double margin = 0.0;  // N, worst-case-phase drive excess over the static hold
};

/// Worst-case-phase slip condition: the phase maximum of
/// m*l*w^2*|cos - mu_s*sin| equals m*l*w^2*sqrt(1+mu_s^2), so slip can occur
/// somewhere in the cycle iff that exceeds mu_s*(M*g + f_d + f_b).
SlipFeasibility slip_feasible(const ErmParams& erm, const ContactParams& contact,
                              const ObjectGeometry& geometry, double r);

/// Closed-form threshold frequency: feasible above, infeasible below.
double min_slip_frequency(const ErmParams& erm, const ContactParams& contact,
                          const ObjectGeometry& geometry, double r);

/// Cycle-averaged net driving force: mean over one vibration period of
/// (|f_v| - mu_k*f_N) restricted to slip-active instants, by adaptive
/// quadrature (1e-8 relative). Zero when slip is infeasible.
double effective_net_force(const ErmParams& erm, const ContactParams& contact,
                           const ObjectGeometry& geometry, double r);

}  // namespace vfm
