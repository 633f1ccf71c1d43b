#include "vfm/model.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <vector>

namespace vfm {

void ErmParams::validate() const {
    if (!(eccentric_mass > 0.0)) throw Error(ErrorCode::ConfigError, "erm.eccentric_mass must be > 0");
    if (!(link_length > 0.0)) throw Error(ErrorCode::ConfigError, "erm.link_length must be > 0");
    if (!(drive_frequency >= 0.0)) throw Error(ErrorCode::ConfigError, "erm.drive_frequency must be >= 0");
}

void ContactParams::validate() const {
    if (!(mu_kinetic > 0.0) || !(mu_kinetic < mu_static))
        throw Error(ErrorCode::ConfigError, "require 0 < mu_kinetic < mu_static");
    if (!(grip_preload >= 0.0)) throw Error(ErrorCode::ConfigError, "contact.grip_preload must be >= 0");
    if (!(finger_radius > 0.0)) throw Error(ErrorCode::ConfigError, "contact.finger_radius must be > 0");
    if (!(gravity > 0.0)) throw Error(ErrorCode::ConfigError, "contact.gravity must be > 0");
}

ObjectGeometry ObjectGeometry::disk(double radius, double mass, double inertia, double thickness) {
    ObjectGeometry g;
    g.shape = ShapeKind::Disk;
    g.radius = radius;
    g.mass = mass;
    g.inertia = inertia;
    g.thickness = thickness;
    return g;
}

ObjectGeometry ObjectGeometry::rectangle(double width, double height, double mass, double inertia,
                                         double thickness) {
    ObjectGeometry g;
    g.shape = ShapeKind::Rectangle;
    g.width = width;
    g.height = height;
    g.mass = mass;
    g.inertia = inertia;
    g.thickness = thickness;
    return g;
}

ObjectGeometry ObjectGeometry::point_mass(double mass, double inertia) {
    ObjectGeometry g;
    g.shape = ShapeKind::PointMass;
    g.mass = mass;
    g.inertia = inertia;
    return g;
}

double ObjectGeometry::plate_inertia() const {
    switch (shape) {
        case ShapeKind::Disk: return 0.5 * mass * radius * radius;
        case ShapeKind::Rectangle: return mass * (width * width + height * height) / 12.0;
        case ShapeKind::PointMass: return inertia;
    }
    return inertia;
}

bool ObjectGeometry::grasp_inside(double r, double phi_grip) const {
    if (r < 0.0) return false;
    switch (shape) {
        case ShapeKind::Disk:
            return r <= radius * (1.0 + 1e-12);
        case ShapeKind::Rectangle: {
            double px = -r * std::cos(phi_grip);
            double py = -r * std::sin(phi_grip);
            const double slack = 1e-12;
            return std::abs(px) <= width / 2.0 + slack && std::abs(py) <= height / 2.0 + slack;
        }
        case ShapeKind::PointMass:
            return true;
    }
    return false;
}

double ObjectGeometry::max_grasp_radius() const {
    switch (shape) {
        case ShapeKind::Disk: return radius;
        case ShapeKind::Rectangle: return 0.5 * std::min(width, height);
        case ShapeKind::PointMass: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

void ObjectGeometry::validate(bool inertia_overridden) const {
    if (!(mass > 0.0)) throw Error(ErrorCode::ConfigError, "object.mass must be > 0");
    if (!(inertia > 0.0)) throw Error(ErrorCode::ConfigError, "object.inertia must be > 0");
    if (shape == ShapeKind::Disk && !(radius > 0.0))
        throw Error(ErrorCode::ConfigError, "object.radius must be > 0");
    if (shape == ShapeKind::Rectangle && (!(width > 0.0) || !(height > 0.0)))
        throw Error(ErrorCode::ConfigError, "object.width/height must be > 0");
    if (shape != ShapeKind::PointMass && !inertia_overridden) {
        double ref = plate_inertia();
        if (std::abs(inertia - ref) > 0.01 * ref)
            throw Error(ErrorCode::ConfigError,
                        "object.inertia deviates more than 1% from the uniform-plate value; "
                        "set object.inertia_override = true to keep it");
    }
}

double vibration_tangential_force(const ErmParams& erm, double t) {
    double w = erm.drive_frequency;
    return erm.eccentric_mass * erm.link_length * w * w * std::cos(w * t);
}

double vibration_normal_force(const ErmParams& erm, double t) {
    double w = erm.drive_frequency;
    return erm.eccentric_mass * erm.link_length * w * w * std::sin(w * t);
}

namespace {

struct SideMoment {
    double area = 0.0;
    double first_moment = 0.0;  // of the signed coordinate along the grasp-COM axis
};

// Clip a convex polygon against the half-plane x >= 0 (grasp frame, x along
// grasp->COM) and return area plus first moment of x over the kept part.
SideMoment clip_half_plane(const std::vector<std::array<double, 2>>& poly, bool keep_positive) {
    std::vector<std::array<double, 2>> kept;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        auto a = poly[i];
        auto b = poly[(i + 1) % n];
        double fa = keep_positive ? a[0] : -a[0];
        double fb = keep_positive ? b[0] : -b[0];
        if (fa >= 0.0) kept.push_back(a);
        if ((fa > 0.0 && fb < 0.0) || (fa < 0.0 && fb > 0.0)) {
            double s = fa / (fa - fb);
            kept.push_back({a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])});
        }
    }
    SideMoment out;
    size_t m = kept.size();
    if (m < 3) return out;
    // Shoelace area and first moment of x (centroid formula pieces).
    double area2 = 0.0, mx6 = 0.0;
    for (size_t i = 0; i < m; ++i) {
        auto& p = kept[i];
        auto& q = kept[(i + 1) % m];
        double cross = p[0] * q[1] - q[0] * p[1];
        area2 += cross;
        mx6 += (p[0] + q[0]) * cross;
    }
    out.area = 0.5 * std::abs(area2);
    out.first_moment = mx6 / 6.0;
    if (area2 < 0.0) out.first_moment = -out.first_moment;
    return out;
}

}  // namespace

MassSplit mass_split(const ObjectGeometry& geometry, double r, double phi_grip) {
    if (r < 0.0 || !geometry.grasp_inside(r, phi_grip))
        throw Error(ErrorCode::GraspOutsideObject, "grasp point outside the object footprint");

    const double M = geometry.mass;
    MassSplit s;
    switch (geometry.shape) {
        case ShapeKind::PointMass:
            s.m1 = M;
            s.r1 = r;
            s.m2 = 0.0;
            s.r2 = 0.0;
            return s;
        case ShapeKind::Disk: {
            // Grasp frame: origin at the grasp point, +x toward the COM.
            // Side 2 is the circular segment beyond the chord at distance r
            // from the disk center.
            double R = geometry.radius;
            double seg_area = R * R * std::acos(std::min(1.0, r / R)) - r * std::sqrt(std::max(0.0, R * R - r * r));
            double total = pi * R * R;
            if (seg_area <= 0.0) {
                s.m1 = M;
                s.r1 = r;
                return s;
            }
            double m2 = M * seg_area / total;
            double centroid_from_center = 2.0 * std::pow(R * R - r * r, 1.5) / (3.0 * seg_area);
            double r2 = centroid_from_center - r;
            double m1 = M - m2;
            double r1 = (M * r + m2 * r2) / m1;
            s.m1 = m1;
            s.r1 = r1;
            s.m2 = m2;
            s.r2 = r2;
            return s;
        }
        case ShapeKind::Rectangle: {
            // Body frame: COM at origin, grasp at -r*(cos,sin)(phi_grip).
            // Work in the grasp frame instead: x along grasp->COM.
            double c = std::cos(phi_grip), sn = std::sin(phi_grip);
            double gx = -r * c, gy = -r * sn;
            std::vector<std::array<double, 2>> poly;
            const double hw = geometry.width / 2.0, hh = geometry.height / 2.0;
            const std::array<std::array<double, 2>, 4> corners = {{{hw, hh}, {-hw, hh}, {-hw, -hh}, {hw, -hh}}};
            for (auto& p : corners) {
                double dx = p[0] - gx, dy = p[1] - gy;
                poly.push_back({dx * c + dy * sn, -dx * sn + dy * c});
            }
            double total = geometry.width * geometry.height;
            SideMoment side1 = clip_half_plane(poly, true);
            SideMoment side2 = clip_half_plane(poly, false);
            double m1 = M * side1.area / total;
            double m2 = M * side2.area / total;
            double r1 = side1.area > 0.0 ? side1.first_moment / side1.area : 0.0;
            double r2 = side2.area > 0.0 ? -side2.first_moment / side2.area : 0.0;
            if (m2 > m1) {
                std::swap(m1, m2);
                std::swap(r1, r2);
            }
            s.m1 = m1;
            s.r1 = r1;
            s.m2 = m2;
            s.r2 = r2;
            return s;
        }
    }
    return s;
}

double tilt_force(const MassSplit& split, const ContactParams& contact) {
    double couple = split.m1 * split.r1 - split.m2 * split.r2;
    return contact.gravity * std::max(0.0, couple) / contact.finger_radius;
}

double tilt_force_at(const ObjectGeometry& geometry, const ContactParams& contact, double r) {
    // First moment of the whole body about the dividing line is M*r for every
    // geometry, so the couple does not depend on the grasp bearing.
    return contact.gravity * geometry.mass * std::max(0.0, r) / contact.finger_radius;
}

double net_normal_force(const ErmParams& erm, const ContactParams& contact,
                        const ObjectGeometry& geometry, double r, double t) {
    return contact.grip_preload + vibration_normal_force(erm, t) +
           geometry.mass * contact.gravity + tilt_force_at(geometry, contact, r);
}

bool slip_active(const ErmParams& erm, const ContactParams& contact,
                 const ObjectGeometry& geometry, double r, double t) {
    double fv = vibration_tangential_force(erm, t);
    double fN = net_normal_force(erm, contact, geometry, r, t);
    return std::abs(fv) > contact.mu_static * std::abs(fN);
}

namespace {

double static_hold_force(const ErmParams&, const ContactParams& contact,
                         const ObjectGeometry& geometry, double r) {
    return geometry.mass * contact.gravity + tilt_force_at(geometry, contact, r) +
           contact.grip_preload;
}

}  // namespace

SlipFeasibility slip_feasible(const ErmParams& erm, const ContactParams& contact,
                              const ObjectGeometry& geometry, double r) {
    double w = erm.drive_frequency;
    double amp = erm.eccentric_mass * erm.link_length * w * w;
    double mu = contact.mu_static;
    double lhs = amp * std::sqrt(1.0 + mu * mu);
    double rhs = mu * static_hold_force(erm, contact, geometry, r);
    SlipFeasibility out;
    out.margin = lhs - rhs;
    out.feasible = out.margin > 0.0;
    return out;
}

double min_slip_frequency(const ErmParams& erm, const ContactParams& contact,
                          const ObjectGeometry& geometry, double r) {
    double mu = contact.mu_static;
    double hold = static_hold_force(erm, contact, geometry, r);
    double ml = erm.eccentric_mass * erm.link_length;
    return std::sqrt(mu * hold / (ml * std::sqrt(1.0 + mu * mu)));
}

namespace {

// Integrand of the cycle average, as a function of phase x = w*t.
struct CycleIntegrand {
    double amp;   // m*l*w^2
    double mu_s;
    double mu_k;
    double hold;  // f_b + M*g + f_d

    double slip_excess(double x) const {
        return amp * std::abs(std::cos(x)) - mu_s * std::abs(hold + amp * std::sin(x));
    }
    double drive(double x) const {
        return amp * std::abs(std::cos(x)) - mu_k * (hold + amp * std::sin(x));
    }
};

double adaptive_simpson(const CycleIntegrand& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f.drive(lm), frm = f.drive(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_interval(const CycleIntegrand& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    double fa = f.drive(a), fb = f.drive(b), fm = f.drive(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

double effective_net_force(const ErmParams& erm, const ContactParams& contact,
                           const ObjectGeometry& geometry, double r) {
    SlipFeasibility feas = slip_feasible(erm, contact, geometry, r);
    if (!feas.feasible) return 0.0;

    CycleIntegrand f{};
    double w = erm.drive_frequency;
    f.amp = erm.eccentric_mass * erm.link_length * w * w;
    f.mu_s = contact.mu_static;
    f.mu_k = contact.mu_kinetic;
    f.hold = static_hold_force(erm, contact, geometry, r);

    // Locate the slip windows: sign changes of the excess over a dense scan,
    // refined by bisection. The excess is piecewise sinusoidal, so a 4096
    // grid cannot miss a window at these parameter scales.
    const int n = 4096;
    std::vector<double> edges;
    double prev_x = 0.0;
    double prev_s = f.slip_excess(0.0);
    for (int i = 1; i <= n; ++i) {
        double x = two_pi * i / n;
        double s = f.slip_excess(x);
        if ((prev_s > 0.0) != (s > 0.0)) {
            double lo = prev_x, hi = x, slo = prev_s;
            for (int k = 0; k < 80; ++k) {
                double mid = 0.5 * (lo + hi);
                double sm = f.slip_excess(mid);
                if ((slo > 0.0) != (sm > 0.0)) {
                    hi = mid;
                } else {
                    lo = mid;
                    slo = sm;
                }
            }
            edges.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_s = s;
    }

    // Build slip sub-intervals over [0, 2pi), splitting at the |cos| kinks.
    std::vector<std::pair<double, double>> windows;
    auto push_window = [&](double a, double b) {
        for (double kink : {pi / 2.0, 1.5 * pi}) {
            if (kink > a && kink < b) {
                windows.emplace_back(a, kink);
                a = kink;
            }
        }
        windows.emplace_back(a, b);
    };
    if (edges.empty()) {
        if (f.slip_excess(1e-3) > 0.0) push_window(0.0, two_pi);
    } else {
        bool inside = f.slip_excess(0.0) > 0.0;
        double start = 0.0;
        for (double e : edges) {
            if (inside) push_window(start, e);
            start = e;
            inside = !inside;
        }
        if (inside) push_window(start, two_pi);
    }

    double scale = std::max(f.amp, f.mu_k * f.hold);
    double tol = 1e-10 * scale;
    double total = 0.0;
    for (auto& [a, b] : windows) total += integrate_interval(f, a, b, tol);
    return total / two_pi;
}

}  // namespace vfm
