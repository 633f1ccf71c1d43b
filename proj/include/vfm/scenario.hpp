#pragma once

// Flat key = value scenario files: one file fully determines a run.
// Frequencies accept *_hz alternatives, angles accept *_deg alternatives;
// everything is stored canonically in SI (rad, rad/s).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfm/controller.hpp"
#include "vfm/sim.hpp"

namespace vfm {

/// Ordered key/value text config with typed access and unknown-key tracking.
class ConfigMap {
  public:
    static ConfigMap parse_text(const std::string& text, const std::string& origin = "<string>");
    static ConfigMap parse_file(const std::string& path);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    double require_double(const std::string& key) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    /// Keys present in the file but never read by the scenario loader.
    std::vector<std::string> unused_keys() const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  private:
    const std::string* find(const std::string& key) const;
    std::vector<std::pair<std::string, std::string>> entries_;
    mutable std::map<std::string, bool> used_;
    std::string origin_;
    std::map<std::string, int> line_of_;

    friend class Scenario;
};

struct GoalSampling {
    int count = 0;
    double r_min = 0.0, r_max = 0.0;
    double phi_min = -pi, phi_max = pi;
    double psi_min = -pi, psi_max = pi;
    std::uint64_t seed = 1;
};

struct Scenario {
    std::string name;
    ObjectGeometry object;
    bool inertia_overridden = false;
    ErmParams erm;
    ContactParams contact;
    ControllerParams controller;
    SimConfig sim;
    ObjectState initial;
    std::vector<GoalState> goal_list;          // explicit goals
    std::optional<GoalSampling> goal_sampling;  // or a sampling spec
    std::vector<std::string> overrides;         // provenance of --set values

    static Scenario load_file(const std::string& path,
                              const std::vector<std::string>& set_overrides = {});
    static Scenario from_config(ConfigMap cfg, const std::vector<std::string>& set_overrides = {});

    void validate() const;
    std::string serialize() const;

    /// Explicit goals, or goals drawn from the sampling spec (trials capped
    /// or extended to `count` when given).
    std::vector<GoalState> materialize_goals(int count = -1) const;

    /// Largest radius the plant tables must cover.
    double table_radius() const;
    Plant make_plant(bool with_tables = true) const;
};

}  // namespace vfm
