#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "test_helpers.hpp"
#include "vfm/scenario.hpp"

using namespace vfm;

namespace {

const char* disk_text = R"(
# unit-test scenario
name = disk-io
object.shape = disk
object.radius = 0.1
object.mass = 0.05
object.thickness = 0.002
erm.eccentric_mass = 0.8e-3
erm.link_length = 3.0e-3
erm.drive_frequency_hz = 168
contact.mu_static = 0.30
contact.mu_kinetic = 0.27
contact.grip_preload = 7.0
contact.finger_radius = 0.010
controller.eps_psi_deg = 0.6
controller.theta_kick_deg = 45
controller.kick_duration = 0.07
controller.duty_period = 0.01
sim.rng_seed = 99
initial.x = 0.02
initial.y = -0.01
goals.mode = sample
sampling.count = 4
sampling.r_min = 0.010
sampling.r_max = 0.040
sampling.seed = 7
)";

Scenario parse_text(const std::string& text, std::vector<std::string> overrides = {}) {
    return Scenario::from_config(ConfigMap::parse_text(text, "<unit>"), overrides);
}

}  // namespace

TEST_CASE("scenario parsing: units and defaults") {
    Scenario s = parse_text(disk_text);
    CHECK(s.name == "disk-io");
    CHECK(s.object.shape == ShapeKind::Disk);
    CHECK(s.object.inertia == doctest::Approx(0.5 * 0.05 * 0.01));  // plate default
    CHECK(s.erm.drive_frequency == doctest::Approx(hz_to_rad(168.0)));
    CHECK(s.controller.eps_psi == doctest::Approx(deg_to_rad(0.6)));
    CHECK(s.controller.theta_kick == doctest::Approx(pi / 4.0).epsilon(1e-12));
    CHECK(s.controller.omega_translate == doctest::Approx(hz_to_rad(240.0)));  // default
    CHECK(s.controller.origin_radius == doctest::Approx(s.sim.r_origin_epsilon));
    CHECK(s.sim.rng_seed == 99);
    REQUIRE(s.goal_sampling.has_value());
    CHECK(s.goal_sampling->count == 4);
}

TEST_CASE("scenario round-trip is semantically identical") {
    Scenario a = parse_text(disk_text);
    Scenario b = parse_text(a.serialize());
    CHECK(a.object.radius == b.object.radius);
    CHECK(a.object.mass == b.object.mass);
    CHECK(a.object.inertia == b.object.inertia);
    CHECK(a.erm.eccentric_mass == b.erm.eccentric_mass);
    CHECK(a.erm.link_length == b.erm.link_length);
    CHECK(a.erm.drive_frequency == b.erm.drive_frequency);
    CHECK(a.contact.mu_static == b.contact.mu_static);
    CHECK(a.contact.mu_kinetic == b.contact.mu_kinetic);
    CHECK(a.contact.grip_preload == b.contact.grip_preload);
    CHECK(a.contact.finger_radius == b.contact.finger_radius);
    CHECK(a.controller.eps_r == b.controller.eps_r);
    CHECK(a.controller.eps_psi == b.controller.eps_psi);
    CHECK(a.controller.r_c == b.controller.r_c);
    CHECK(a.controller.theta_kick == b.controller.theta_kick);
    CHECK(a.controller.kick_duration == b.controller.kick_duration);
    CHECK(a.controller.omega_rotate == b.controller.omega_rotate);
    CHECK(a.controller.omega_translate == b.controller.omega_translate);
    CHECK(a.controller.duty_fraction == b.controller.duty_fraction);
    CHECK(a.controller.duty_period == b.controller.duty_period);
    CHECK(a.controller.settle_time == b.controller.settle_time);
    CHECK(a.sim.dt == b.sim.dt);
    CHECK(a.sim.sensor_pos_noise_std == b.sim.sensor_pos_noise_std);
    CHECK(a.sim.sensor_ang_noise_std == b.sim.sensor_ang_noise_std);
    CHECK(a.sim.rng_seed == b.sim.rng_seed);
    CHECK(a.sim.sensor_rate == b.sim.sensor_rate);
    CHECK(a.initial.x == b.initial.x);
    CHECK(a.initial.y == b.initial.y);
    REQUIRE(b.goal_sampling.has_value());
    CHECK(a.goal_sampling->r_min == b.goal_sampling->r_min);
    CHECK(a.goal_sampling->r_max == b.goal_sampling->r_max);
    CHECK(a.goal_sampling->seed == b.goal_sampling->seed);

    // Materialized goals are identical too.
    auto ga = a.materialize_goals(), gb = b.materialize_goals();
    REQUIRE(ga.size() == gb.size());
    for (size_t i = 0; i < ga.size(); ++i) {
        CHECK(ga[i].r_g == gb[i].r_g);
        CHECK(ga[i].phi_g == gb[i].phi_g);
        CHECK(ga[i].psi_g == gb[i].psi_g);
    }
}

TEST_CASE("scenario validation names the violated invariant") {
    SUBCASE("mu_kinetic above mu_static") {
        std::string text = disk_text;
        try {
            parse_text(text, {"contact.mu_kinetic=0.5"});
            FAIL("expected ConfigError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ConfigError);
            CHECK(std::string(e.what()).find("mu_kinetic") != std::string::npos);
        }
    }
    SUBCASE("unknown key is flagged with its name") {
        try {
            parse_text(std::string(disk_text) + "contact.stiffness = 4\n");
            FAIL("expected ConfigError");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("contact.stiffness") != std::string::npos);
        }
    }
    SUBCASE("malformed number carries the line") {
        try {
            parse_text("name = x\nobject.mass = heavy\n");
            FAIL("expected ConfigError");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    SUBCASE("duplicate keys rejected") {
        CHECK_THROWS_AS(parse_text("name = a\nname = b\n"), Error);
    }
    SUBCASE("inertia off the plate value needs the override flag") {
        CHECK_THROWS_AS(parse_text(std::string(disk_text) + "object.inertia = 1e-3\n"), Error);
        Scenario s = parse_text(std::string(disk_text) +
                                "object.inertia = 1e-3\nobject.inertia_override = true\n");
        CHECK(s.object.inertia == doctest::Approx(1e-3));
    }
    SUBCASE("goal radius outside the grasp region") {
        CHECK_THROWS_AS(parse_text(disk_text, {"sampling.r_max=0.2"}), Error);
    }
}

TEST_CASE("overrides are applied and recorded") {
    Scenario s = parse_text(disk_text, {"controller.duty_fraction=1.0", "sim.rng_seed=5"});
    CHECK(s.controller.duty_fraction == 1.0);
    CHECK(s.sim.rng_seed == 5);
    REQUIRE(s.overrides.size() == 2);
    CHECK(s.overrides[0] == "controller.duty_fraction=1.0");
}

TEST_CASE("scenario file loading") {
    std::string path = "/tmp/vfm_unit_scn.scn";
    {
        std::ofstream out(path);
        out << disk_text;
    }
    Scenario s = Scenario::load_file(path);
    CHECK(s.name == "disk-io");
    std::remove(path.c_str());
    CHECK_THROWS_AS(Scenario::load_file("/tmp/does_not_exist.scn"), Error);
}
