#include "vfm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace vfm {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// Scenario serialization must survive a parse round trip exactly, so it
// keeps full double precision (the 9-significant-digit rule applies to the
// emitted CSV tables, not to configs).
std::string format_full(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

ConfigMap ConfigMap::parse_text(const std::string& text, const std::string& origin) {
    ConfigMap cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError,
                        origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw Error(ErrorCode::ConfigError,
                        origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.find(key) != nullptr)
            throw Error(ErrorCode::ConfigError,
                        origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.entries_.emplace_back(key, value);
        cfg.line_of_[key] = lineno;
    }
    return cfg;
}

ConfigMap ConfigMap::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

const std::string* ConfigMap::find(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return &v;
    return nullptr;
}

bool ConfigMap::has(const std::string& key) const { return find(key) != nullptr; }

void ConfigMap::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    used_[key] = true;
    return v ? *v : fallback;
}

std::string ConfigMap::require_string(const std::string& key) const {
    const std::string* v = find(key);
    used_[key] = true;
    if (!v) throw Error(ErrorCode::ConfigError, origin_ + ": missing required key '" + key + "'");
    return *v;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    const std::string* v = find(key);
    used_[key] = true;
    if (!v) return fallback;
    try {
        size_t pos = 0;
        double d = std::stod(*v, &pos);
        if (pos != v->size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        int line = line_of_.count(key) ? line_of_.at(key) : 0;
        throw Error(ErrorCode::ConfigError, origin_ + ":" + std::to_string(line) + ": key '" + key +
                                                "' is not a number: '" + *v + "'");
    }
}

double ConfigMap::require_double(const std::string& key) const {
    if (!has(key)) throw Error(ErrorCode::ConfigError, origin_ + ": missing required key '" + key + "'");
    return get_double(key, 0.0);
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    const std::string* v = find(key);
    used_[key] = true;
    if (!v) return fallback;
    if (*v == "true" || *v == "1") return true;
    if (*v == "false" || *v == "0") return false;
    throw Error(ErrorCode::ConfigError, origin_ + ": key '" + key + "' is not a boolean: '" + *v + "'");
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
    const std::string* v = find(key);
    used_[key] = true;
    if (!v) return fallback;
    try {
        return std::stoull(*v);
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, origin_ + ": key '" + key + "' is not an integer: '" + *v + "'");
    }
}

std::vector<std::string> ConfigMap::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

namespace {

// Frequency keys accept `<key>` in rad/s or `<key>_hz`; angle keys accept
// `<key>` in rad or `<key>_deg`. The SI spelling wins when both appear
// (overrides use it), and either spelling consumes both.
double get_freq(const ConfigMap& cfg, const std::string& key, double fallback) {
    double alt = cfg.has(key + "_hz") ? hz_to_rad(cfg.get_double(key + "_hz", 0.0)) : fallback;
    return cfg.get_double(key, alt);
}

double get_angle(const ConfigMap& cfg, const std::string& key, double fallback) {
    double alt = cfg.has(key + "_deg") ? deg_to_rad(cfg.get_double(key + "_deg", 0.0)) : fallback;
    return cfg.get_double(key, alt);
}

}  // namespace

Scenario Scenario::from_config(ConfigMap cfg, const std::vector<std::string>& set_overrides) {
    for (const std::string& ov : set_overrides) {
        size_t eq = ov.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError, "override '" + ov + "' is not key=value");
        cfg.set(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }

    Scenario s;
    s.overrides = set_overrides;
    s.name = cfg.get_string("name", "unnamed");

    std::string shape = cfg.get_string("object.shape", "disk");
    double mass = cfg.require_double("object.mass");
    s.inertia_overridden = cfg.get_bool("object.inertia_override", false);
    double thickness = cfg.get_double("object.thickness", 0.0);
    if (shape == "disk") {
        double radius = cfg.require_double("object.radius");
        ObjectGeometry g = ObjectGeometry::disk(radius, mass, 1.0, thickness);
        g.inertia = cfg.get_double("object.inertia", g.plate_inertia());
        s.object = g;
    } else if (shape == "rectangle") {
        double w = cfg.require_double("object.width");
        double h = cfg.require_double("object.height");
        ObjectGeometry g = ObjectGeometry::rectangle(w, h, mass, 1.0, thickness);
        g.inertia = cfg.get_double("object.inertia", g.plate_inertia());
        s.object = g;
    } else if (shape == "point_mass") {
        s.object = ObjectGeometry::point_mass(mass, cfg.require_double("object.inertia"));
    } else {
        throw Error(ErrorCode::ConfigError, "object.shape must be disk, rectangle or point_mass");
    }

    s.erm.eccentric_mass = cfg.get_double("erm.eccentric_mass", s.erm.eccentric_mass);
    s.erm.link_length = cfg.get_double("erm.link_length", s.erm.link_length);
    s.erm.drive_frequency = get_freq(cfg, "erm.drive_frequency", hz_to_rad(168.0));

    s.contact.mu_static = cfg.get_double("contact.mu_static", s.contact.mu_static);
    s.contact.mu_kinetic = cfg.get_double("contact.mu_kinetic", s.contact.mu_kinetic);
    s.contact.grip_preload = cfg.get_double("contact.grip_preload", s.contact.grip_preload);
    s.contact.finger_radius = cfg.get_double("contact.finger_radius", s.contact.finger_radius);
    s.contact.gravity = cfg.get_double("contact.gravity", s.contact.gravity);

    ControllerParams& c = s.controller;
    c.eps_r = cfg.get_double("controller.eps_r", c.eps_r);
    c.eps_psi = get_angle(cfg, "controller.eps_psi", c.eps_psi);
    c.r_c = cfg.get_double("controller.r_c", c.r_c);
    c.theta_kick = get_angle(cfg, "controller.theta_kick", c.theta_kick);
    c.kick_duration = cfg.get_double("controller.kick_duration", c.kick_duration);
    c.omega_rotate = get_freq(cfg, "controller.omega_rotate", c.omega_rotate);
    c.omega_translate = get_freq(cfg, "controller.omega_translate", c.omega_translate);
    c.duty_fraction = cfg.get_double("controller.duty_fraction", c.duty_fraction);
    c.duty_period = cfg.get_double("controller.duty_period", c.duty_period);
    c.settle_time = cfg.get_double("controller.settle_time", c.settle_time);
    c.phase_budget_translate = cfg.get_double("controller.phase_budget_translate", c.phase_budget_translate);
    c.phase_budget_rotate = cfg.get_double("controller.phase_budget_rotate", c.phase_budget_rotate);
    c.phase_budget_other = cfg.get_double("controller.phase_budget_other", c.phase_budget_other);

    SimConfig& m = s.sim;
    m.dt = cfg.get_double("sim.dt", m.dt);
    m.sensor_pos_noise_std = cfg.get_double("sim.sensor_pos_noise_std", m.sensor_pos_noise_std);
    m.sensor_ang_noise_std = get_angle(cfg, "sim.sensor_ang_noise_std", m.sensor_ang_noise_std);
    m.perturbation_torque_std = cfg.get_double("sim.perturbation_torque_std", m.perturbation_torque_std);
    m.rng_seed = cfg.get_u64("sim.rng_seed", m.rng_seed);
    m.sensor_rate = cfg.get_double("sim.sensor_rate_hz", m.sensor_rate);
    m.r_origin_epsilon = cfg.get_double("sim.r_origin_epsilon", m.r_origin_epsilon);
    m.max_sim_time = cfg.get_double("sim.max_sim_time", m.max_sim_time);
    c.origin_radius = m.r_origin_epsilon;

    s.initial.x = cfg.get_double("initial.x", 0.02);
    s.initial.y = cfg.get_double("initial.y", 0.0);
    s.initial.psi = get_angle(cfg, "initial.psi", 0.0);

    std::string goals_mode = cfg.get_string("goals.mode", cfg.has("sampling.count") ? "sample" : "list");
    // Keys of the inactive goal family are legal but dormant (a --set
    // override can flip goals.mode without trimming the file).
    for (const char* key : {"sampling.count", "sampling.r_min", "sampling.r_max", "sampling.phi_min",
                            "sampling.phi_max", "sampling.psi_min", "sampling.psi_max",
                            "sampling.seed"})
        cfg.get_string(key, "");
    for (int i = 0;; ++i) {
        std::string prefix = "goal." + std::to_string(i) + ".";
        if (!cfg.has(prefix + "r")) break;
        for (const char* suffix : {"r", "phi", "phi_deg", "psi", "psi_deg"})
            cfg.get_string(prefix + suffix, "");
    }
    if (goals_mode == "list") {
        for (int i = 0;; ++i) {
            std::string prefix = "goal." + std::to_string(i) + ".";
            if (!cfg.has(prefix + "r")) break;
            GoalState g;
            g.r_g = cfg.require_double(prefix + "r");
            g.phi_g = get_angle(cfg, prefix + "phi", 0.0);
            g.psi_g = get_angle(cfg, prefix + "psi", 0.0);
            s.goal_list.push_back(g);
        }
        if (s.goal_list.empty())
            throw Error(ErrorCode::ConfigError, "goals.mode = list requires goal.0.* keys");
    } else if (goals_mode == "sample") {
        GoalSampling gs;
        gs.count = static_cast<int>(cfg.get_u64("sampling.count", 1));
        gs.r_min = cfg.require_double("sampling.r_min");
        gs.r_max = cfg.require_double("sampling.r_max");
        gs.phi_min = get_angle(cfg, "sampling.phi_min", -pi);
        gs.phi_max = get_angle(cfg, "sampling.phi_max", pi);
        gs.psi_min = get_angle(cfg, "sampling.psi_min", -pi);
        gs.psi_max = get_angle(cfg, "sampling.psi_max", pi);
        gs.seed = cfg.get_u64("sampling.seed", 1);
        s.goal_sampling = gs;
    } else {
        throw Error(ErrorCode::ConfigError, "goals.mode must be list or sample");
    }

    std::vector<std::string> unknown = cfg.unused_keys();
    if (!unknown.empty()) {
        std::string msg = "unknown key(s):";
        for (const auto& k : unknown) msg += " '" + k + "'";
        throw Error(ErrorCode::ConfigError, cfg.origin_ + ": " + msg);
    }

    s.validate();
    return s;
}

Scenario Scenario::load_file(const std::string& path, const std::vector<std::string>& set_overrides) {
    return from_config(ConfigMap::parse_file(path), set_overrides);
}

void Scenario::validate() const {
    object.validate(inertia_overridden);
    erm.validate();
    contact.validate();
    controller.validate();
    sim.validate();
    if (!initial.finite()) throw Error(ErrorCode::ConfigError, "initial state must be finite");

    auto check_goal = [&](const GoalState& g) {
        GoalState n = g;
        n.validate();
        if (g.r_g > object.max_grasp_radius())
            throw Error(ErrorCode::ConfigError,
                        "goal radius " + std::to_string(g.r_g) + " outside the admissible grasp region");
    };
    for (const auto& g : goal_list) check_goal(g);
    if (goal_sampling) {
        const GoalSampling& gs = *goal_sampling;
        if (gs.count < 1) throw Error(ErrorCode::ConfigError, "sampling.count must be >= 1");
        if (!(gs.r_min >= 0.0) || !(gs.r_max >= gs.r_min))
            throw Error(ErrorCode::ConfigError, "sampling r range invalid");
        check_goal(GoalState{gs.r_max, 0.0, 0.0});
    }
    if (controller.r_c > object.max_grasp_radius())
        throw Error(ErrorCode::ConfigError, "controller.r_c outside the object footprint");
}

std::string Scenario::serialize() const {
    std::ostringstream out;
    auto kv = [&](const std::string& k, const std::string& v) { out << k << " = " << v << "\n"; };
    auto kvd = [&](const std::string& k, double v) { kv(k, format_full(v)); };

    kv("name", name);
    switch (object.shape) {
        case ShapeKind::Disk:
            kv("object.shape", "disk");
            kvd("object.radius", object.radius);
            break;
        case ShapeKind::Rectangle:
            kv("object.shape", "rectangle");
            kvd("object.width", object.width);
            kvd("object.height", object.height);
            break;
        case ShapeKind::PointMass:
            kv("object.shape", "point_mass");
            break;
    }
    kvd("object.mass", object.mass);
    kvd("object.inertia", object.inertia);
    if (inertia_overridden) kv("object.inertia_override", "true");
    kvd("object.thickness", object.thickness);
    kvd("erm.eccentric_mass", erm.eccentric_mass);
    kvd("erm.link_length", erm.link_length);
    kvd("erm.drive_frequency", erm.drive_frequency);
    kvd("contact.mu_static", contact.mu_static);
    kvd("contact.mu_kinetic", contact.mu_kinetic);
    kvd("contact.grip_preload", contact.grip_preload);
    kvd("contact.finger_radius", contact.finger_radius);
    kvd("contact.gravity", contact.gravity);
    kvd("controller.eps_r", controller.eps_r);
    kvd("controller.eps_psi", controller.eps_psi);
    kvd("controller.r_c", controller.r_c);
    kvd("controller.theta_kick", controller.theta_kick);
    kvd("controller.kick_duration", controller.kick_duration);
    kvd("controller.omega_rotate", controller.omega_rotate);
    kvd("controller.omega_translate", controller.omega_translate);
    kvd("controller.duty_fraction", controller.duty_fraction);
    kvd("controller.duty_period", controller.duty_period);
    kvd("controller.settle_time", controller.settle_time);
    kvd("controller.phase_budget_translate", controller.phase_budget_translate);
    kvd("controller.phase_budget_rotate", controller.phase_budget_rotate);
    kvd("controller.phase_budget_other", controller.phase_budget_other);
    kvd("sim.dt", sim.dt);
    kvd("sim.sensor_pos_noise_std", sim.sensor_pos_noise_std);
    kvd("sim.sensor_ang_noise_std", sim.sensor_ang_noise_std);
    kvd("sim.perturbation_torque_std", sim.perturbation_torque_std);
    kv("sim.rng_seed", std::to_string(sim.rng_seed));
    kvd("sim.sensor_rate_hz", sim.sensor_rate);
    kvd("sim.r_origin_epsilon", sim.r_origin_epsilon);
    kvd("sim.max_sim_time", sim.max_sim_time);
    kvd("initial.x", initial.x);
    kvd("initial.y", initial.y);
    kvd("initial.psi", initial.psi);
    if (!goal_list.empty()) {
        kv("goals.mode", "list");
        for (size_t i = 0; i < goal_list.size(); ++i) {
            std::string p = "goal." + std::to_string(i) + ".";
            kvd(p + "r", goal_list[i].r_g);
            kvd(p + "phi", goal_list[i].phi_g);
            kvd(p + "psi", goal_list[i].psi_g);
        }
    } else if (goal_sampling) {
        kv("goals.mode", "sample");
        kv("sampling.count", std::to_string(goal_sampling->count));
        kvd("sampling.r_min", goal_sampling->r_min);
        kvd("sampling.r_max", goal_sampling->r_max);
        kvd("sampling.phi_min", goal_sampling->phi_min);
        kvd("sampling.phi_max", goal_sampling->phi_max);
        kvd("sampling.psi_min", goal_sampling->psi_min);
        kvd("sampling.psi_max", goal_sampling->psi_max);
        kv("sampling.seed", std::to_string(goal_sampling->seed));
    }
    return out.str();
}

std::vector<GoalState> Scenario::materialize_goals(int count) const {
    std::vector<GoalState> goals;
    if (!goal_list.empty()) {
        goals = goal_list;
        if (count > 0 && static_cast<int>(goals.size()) > count) goals.resize(count);
        return goals;
    }
    const GoalSampling& gs = *goal_sampling;
    int n = count > 0 ? count : gs.count;
    std::mt19937_64 eng(gs.seed);
    std::uniform_real_distribution<double> ur(gs.r_min, gs.r_max);
    std::uniform_real_distribution<double> uphi(gs.phi_min, gs.phi_max);
    std::uniform_real_distribution<double> upsi(gs.psi_min, gs.psi_max);
    for (int i = 0; i < n; ++i) {
        GoalState g;
        g.r_g = ur(eng);
        g.phi_g = wrap_pi(uphi(eng));
        g.psi_g = wrap_pi(upsi(eng));
        goals.push_back(g);
    }
    return goals;
}

double Scenario::table_radius() const {
    double footprint = 0.0;
    switch (object.shape) {
        case ShapeKind::Disk: footprint = object.radius; break;
        case ShapeKind::Rectangle:
            footprint = 0.5 * std::hypot(object.width, object.height);
            break;
        case ShapeKind::PointMass: footprint = 0.0; break;
    }
    double goal_max = controller.r_c;
    for (const auto& g : goal_list) goal_max = std::max(goal_max, g.r_g);
    if (goal_sampling) goal_max = std::max(goal_max, goal_sampling->r_max);
    goal_max = std::max(goal_max, initial.r());
    return std::max(footprint, 2.0 * goal_max);
}

Plant Scenario::make_plant(bool with_tables) const {
    Plant p;
    p.geometry = object;
    p.erm = erm;
    p.contact = contact;
    if (with_tables) {
        double r_max = table_radius();
        p.build_table(controller.omega_rotate, r_max);
        if (controller.omega_translate != controller.omega_rotate)
            p.build_table(controller.omega_translate, r_max);
    }
    return p;
}

}  // namespace vfm
