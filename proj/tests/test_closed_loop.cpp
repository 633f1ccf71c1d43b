#include <doctest.h>

#include <cmath>

#include "test_helpers.hpp"
#include "vfm/controller.hpp"
#include "vfm/harness.hpp"

using namespace vfm;
using namespace vfm::test;

namespace {

// The bundled disk, built in code so unit tests do not depend on files.
Scenario disk_scenario() {
    Scenario s;
    s.name = "disk-unit";
    s.object = disk_geometry();
    s.erm = disk_erm();
    s.contact = disk_contact();
    s.controller.eps_psi = deg_to_rad(0.6);
    s.controller.theta_kick = pi / 4.0;
    s.controller.kick_duration = 0.07;
    s.controller.duty_period = 0.01;
    s.controller.origin_radius = s.sim.r_origin_epsilon;
    s.sim.sensor_pos_noise_std = 0.0;
    s.sim.sensor_ang_noise_std = 0.0;
    s.sim.perturbation_torque_std = 0.0;
    s.sim.rng_seed = 11;
    s.sim.max_sim_time = 150.0;
    s.initial.x = 0.02;
    s.initial.y = -0.01;
    GoalSampling gs;
    gs.count = 10;
    gs.r_min = 0.010;
    gs.r_max = 0.040;
    gs.seed = 7;
    s.goal_sampling = gs;
    return s;
}

}  // namespace

TEST_CASE("run: initial state inside the tolerances is Reached promptly") {
    Scenario s = disk_scenario();
    Plant plant = s.make_plant();
    GoalState goal{0.0205, 0.3, 0.0};
    ObjectState init;
    init.x = 0.02 * std::cos(0.3);
    init.y = 0.02 * std::sin(0.3);
    EpisodeResult ep = run_episode(s, plant, goal, init, 1);
    CHECK(ep.outcome == Outcome::Reached);
    CHECK(ep.sim_time < 2.0);
    CHECK(ep.final_pos_err < 2e-3);
}

TEST_CASE("run: noise-free goal (40 mm, pi/4, 30 deg) hits the paper bounds") {
    Scenario s = disk_scenario();
    Plant plant = s.make_plant();
    GoalState goal{0.04, pi / 4.0, deg_to_rad(30.0)};
    Trajectory traj;
    EpisodeResult ep = run_episode(s, plant, goal, s.initial, 5, &traj);
    CHECK(ep.outcome == Outcome::Reached);
    CHECK(ep.final_pos_err <= 1e-3);
    CHECK(ep.final_ang_err <= deg_to_rad(1.0));

    // The full phase sequence appears exactly once, in order.
    std::vector<Phase> seq;
    for (const auto& tr : ep.transitions) seq.push_back(tr.to);
    std::vector<Phase> expected = {Phase::SpinUpRadius, Phase::Kick,         Phase::Rotate,
                                   Phase::ReturnToCom,  Phase::DepartOrigin, Phase::ToGoal,
                                   Phase::Done};
    REQUIRE(seq.size() == expected.size());
    for (size_t i = 0; i < seq.size(); ++i) CHECK(seq[i] == expected[i]);

    // Trajectory sampling is uniform and strictly increasing in t.
    for (size_t i = 1; i < traj.samples.size(); ++i)
        CHECK(traj.samples[i].t == doctest::Approx(traj.samples[i - 1].t + s.sim.dt));
}

TEST_CASE("run: frequency forced below the slip threshold faults") {
    Scenario s = disk_scenario();
    double wstar = min_slip_frequency(s.erm, s.contact, s.object, 0.02);
    s.controller.omega_translate = 0.9 * wstar;
    Plant plant = s.make_plant();
    GoalState goal{0.02, 0.0, 0.1};
    EpisodeResult ep = run_episode(s, plant, goal, s.initial, 1);
    CHECK(ep.outcome == Outcome::Fault);
    CHECK(ep.fault_reason.find("Infeasible") != std::string::npos);
}

TEST_CASE("run: terminates on random goals, noise-free") {
    Scenario s = disk_scenario();
    Plant plant = s.make_plant();
    std::vector<GoalState> goals = s.materialize_goals(10);
    ObjectState init = s.initial;
    for (size_t i = 0; i < goals.size(); ++i) {
        CAPTURE(i);
        EpisodeResult ep = run_episode(s, plant, goals[i], init, mix_seed(11, i));
        CHECK(ep.outcome == Outcome::Reached);
        CHECK(ep.final_pos_err <= 1e-3);
        CHECK(ep.final_ang_err <= deg_to_rad(1.0));
        init = ep.final_state;
        init.vx = init.vy = init.psi_dot = 0.0;
    }
}

TEST_CASE("run: halts are commanded at every phase boundary and Done is quiet") {
    Scenario s = disk_scenario();
    Plant plant = s.make_plant();
    GoalState goal{0.03, -0.8, deg_to_rad(-20.0)};
    Trajectory traj;
    EpisodeResult ep = run_episode(s, plant, goal, s.initial, 3, &traj);
    REQUIRE(ep.outcome == Outcome::Reached);

    // Index samples by time to look up the command on each transition tick.
    size_t k = 0;
    for (const auto& tr : ep.transitions) {
        while (k < traj.samples.size() && traj.samples[k].t < tr.t - 1e-12) ++k;
        REQUIRE(k < traj.samples.size());
        CHECK(traj.samples[k].cmd.frequency == 0.0);
    }
    for (const auto& sample : traj.samples)
        if (sample.phase == "Done") CHECK(sample.cmd.frequency == 0.0);
}

TEST_CASE("run: identical seeds reproduce the trajectory bit for bit") {
    Scenario s = disk_scenario();
    s.sim.sensor_pos_noise_std = 1.5e-3;
    s.sim.sensor_ang_noise_std = deg_to_rad(1.0);
    s.sim.perturbation_torque_std = 2e-5;
    Plant plant = s.make_plant();
    GoalState goal{0.025, 0.5, deg_to_rad(15.0)};

    Trajectory t1, t2;
    EpisodeResult a = run_episode(s, plant, goal, s.initial, 77, &t1);
    EpisodeResult b = run_episode(s, plant, goal, s.initial, 77, &t2);
    CHECK(a.final_pos_err == b.final_pos_err);
    CHECK(a.final_ang_err == b.final_ang_err);
    REQUIRE(t1.samples.size() == t2.samples.size());
    for (size_t i = 0; i < t1.samples.size(); i += 97) {
        CHECK(t1.samples[i].truth.x == t2.samples[i].truth.x);
        CHECK(t1.samples[i].measured.psi == t2.samples[i].measured.psi);
        CHECK(t1.samples[i].cmd.steering_angle == t2.samples[i].cmd.steering_angle);
    }
}

TEST_CASE("paired duty comparison: duty drifts less during ToGoal") {
    Scenario s = disk_scenario();
    s.sim.sensor_pos_noise_std = 1.5e-3;
    s.sim.sensor_ang_noise_std = deg_to_rad(1.0);
    s.sim.perturbation_torque_std = 2e-5;
    GoalSampling gs = *s.goal_sampling;
    gs.count = 8;
    s.goal_sampling = gs;
    PairedBench pb = run_paired_bench(s, 8);
    CHECK(pb.duty.reached == 8);
    int duty_lower = 0;
    for (size_t i = 0; i < pb.duty.rows.size(); ++i)
        if (pb.duty.rows[i].togoal_drift_deg < pb.continuous.rows[i].togoal_drift_deg) ++duty_lower;
    CHECK(duty_lower >= 7);
    CHECK(pb.duty_better);
}
