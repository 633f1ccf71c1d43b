#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "test_helpers.hpp"
#include "vfm/model.hpp"

using namespace vfm;
using namespace vfm::test;

TEST_CASE("vibration forces: amplitude and phase") {
    ErmParams erm = disk_erm();
    double w = erm.drive_frequency;

    // Amplitude m*l*w^2 at 168 Hz, cross-checked against an arbitrary
    // precision evaluation of 0.8e-3 * 3.0e-3 * (2*pi*168)^2.
    CHECK(vibration_tangential_force(erm, 0.0) ==
          doctest::Approx(2.67417326031692215).epsilon(1e-13));
    CHECK(vibration_normal_force(erm, 0.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(vibration_normal_force(erm, (pi / 2.0) / w) ==
          doctest::Approx(2.67417326031692215).epsilon(1e-12));
    CHECK(std::abs(vibration_tangential_force(erm, (pi / 2.0) / w)) < 1e-12);

    // Unit-amplitude sanity: m*l*w^2 = 1.
    ErmParams unit;
    unit.eccentric_mass = 1.0;
    unit.link_length = 1.0;
    unit.drive_frequency = 1.0;
    CHECK(vibration_tangential_force(unit, 0.0) == doctest::Approx(1.0));

    // Phase-shift identity f_n(t) = f_v(t - pi/(2w)) on a grid.
    for (int i = 0; i <= 200; ++i) {
        double t = 3.0 * pi / w * i / 200.0 + pi / (2.0 * w);
        CHECK(vibration_normal_force(erm, t) ==
              doctest::Approx(vibration_tangential_force(erm, t - pi / (2.0 * w))).epsilon(1e-12));
    }
}

TEST_CASE("net normal force is the sum of its terms") {
    ObjectGeometry geo = disk_geometry();
    ContactParams contact = disk_contact();

    SUBCASE("no vibration, grasp at COM") {
        ErmParams off = disk_erm(0.0);
        CHECK(net_normal_force(off, contact, geo, 0.0, 0.3) ==
              doctest::Approx(contact.grip_preload + geo.mass * contact.gravity).epsilon(1e-14));
    }
    SUBCASE("sin peak adds the full vibration amplitude") {
        ErmParams erm = disk_erm();
        double w = erm.drive_frequency;
        double amp = erm.eccentric_mass * erm.link_length * w * w;
        double fd = tilt_force_at(geo, contact, 0.03);
        CHECK(net_normal_force(erm, contact, geo, 0.03, (pi / 2.0) / w) ==
              doctest::Approx(contact.grip_preload + geo.mass * contact.gravity + fd + amp)
                  .epsilon(1e-13));
    }
    SUBCASE("term-by-term against independently computed pieces") {
        ErmParams erm = disk_erm();
        double t = 0.8341;
        double expected = 7.0 + 0.05 * 9.81 + 9.81 * 0.05 * 0.03 / 10e-3 +
                          0.8e-3 * 3.0e-3 * erm.drive_frequency * erm.drive_frequency *
                              std::sin(erm.drive_frequency * t);
        CHECK(net_normal_force(erm, contact, geo, 0.03, t) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("slip_active matches a dense per-instant oracle") {
    ObjectGeometry geo = disk_geometry();
    ContactParams contact = disk_contact();
    ErmParams erm = disk_erm(hz_to_rad(240.0));
    double w = erm.drive_frequency;
    double r = 0.02;

    SUBCASE("no drive never slips") {
        ErmParams off = disk_erm(0.0);
        for (int i = 0; i < 50; ++i) CHECK_FALSE(slip_active(off, contact, geo, r, 0.01 * i));
    }
    SUBCASE("frictionless always slips off the cos zeros") {
        ContactParams nofric = contact;
        nofric.mu_static = 1e-30;  // validation requires mu_k < mu_s > 0
        nofric.mu_kinetic = 1e-31;
        CHECK(slip_active(erm, nofric, geo, r, 0.0));
        CHECK(slip_active(erm, nofric, geo, r, pi / w));
    }
    SUBCASE("one period at 240 Hz against 1e5 samples") {
        double amp = 0.8e-3 * 3.0e-3 * w * w;
        double hold = 7.0 + 0.05 * 9.81 + 9.81 * 0.05 * r / 10e-3;
        int n = 100000;
        for (int i = 0; i < n; ++i) {
            double t = two_pi / w * i / n;
            bool oracle = std::abs(amp * std::cos(w * t)) >
                          contact.mu_static * std::abs(hold + amp * std::sin(w * t));
            REQUIRE(slip_active(erm, contact, geo, r, t) == oracle);
        }
    }
}

TEST_CASE("slip_feasible against brute-force phase maximization") {
    ObjectGeometry geo = disk_geometry();
    ContactParams contact = disk_contact();

    SUBCASE("zero frequency infeasible with the static margin") {
        ErmParams off = disk_erm(0.0);
        auto f = slip_feasible(off, contact, geo, 0.0);
        CHECK_FALSE(f.feasible);
        CHECK(f.margin ==
              doctest::Approx(-contact.mu_static * (0.05 * 9.81 + 7.0)).epsilon(1e-13));
    }
    SUBCASE("frictionless is feasible at any positive frequency") {
        ContactParams nofric = contact;
        nofric.mu_static = 1e-30;
        nofric.mu_kinetic = 1e-31;
        CHECK(slip_feasible(disk_erm(1.0), nofric, geo, 0.0).feasible);
    }
    SUBCASE("bundled disk margin equals the sampled phase maximum") {
        ErmParams erm = disk_erm();
        double r = 7.75e-3;
        double amp = 0.8e-3 * 3.0e-3 * erm.drive_frequency * erm.drive_frequency;
        double hold = 7.0 + 0.05 * 9.81 + 9.81 * 0.05 * r / 10e-3;
        double best = 0.0;
        int n = 1000000;
        for (int i = 0; i < n; ++i) {
            double x = two_pi * i / n;
            best = std::max(best, amp * std::abs(std::cos(x) - contact.mu_static * std::sin(x)));
        }
        auto f = slip_feasible(erm, contact, geo, r);
        CHECK(f.feasible == (best - contact.mu_static * hold > 0.0));
        // The sampled maximum approaches amp*sqrt(1+mu^2) from below.
        CHECK(rel_err(f.margin, best - contact.mu_static * hold) < 1e-9);
    }
}

TEST_CASE("min_slip_frequency: scaling laws and bisection oracle") {
    ObjectGeometry geo = disk_geometry();
    ContactParams contact = disk_contact();
    ErmParams erm = disk_erm();

    SUBCASE("massless limit gives zero threshold") {
        ObjectGeometry tiny = ObjectGeometry::point_mass(1e-300, 1e-12);
        ContactParams c = contact;
        c.grip_preload = 0.0;
        CHECK(min_slip_frequency(erm, c, tiny, 0.0) == doctest::Approx(0.0).scale(1e-6));
    }
    SUBCASE("doubling the preload scales the threshold by sqrt(2)") {
        ObjectGeometry tiny = ObjectGeometry::point_mass(1e-300, 1e-12);
        ContactParams c1 = contact;
        c1.grip_preload = 1.0;
        ContactParams c2 = contact;
        c2.grip_preload = 2.0;
        CHECK(min_slip_frequency(erm, c2, tiny, 0.0) ==
              doctest::Approx(std::sqrt(2.0) * min_slip_frequency(erm, c1, tiny, 0.0)).epsilon(1e-12));
    }
    SUBCASE("bisection on slip_feasible recovers the closed form") {
        double r = 0.015;
        double closed = min_slip_frequency(erm, contact, geo, r);
        double lo = 0.0, hi = 4.0 * closed;
        REQUIRE(slip_feasible(disk_erm(hi), contact, geo, r).feasible);
        for (int i = 0; i < 200; ++i) {
            double mid = 0.5 * (lo + hi);
            if (slip_feasible(disk_erm(mid), contact, geo, r).feasible)
                hi = mid;
            else
                lo = mid;
        }
        CHECK(rel_err(closed, 0.5 * (lo + hi)) < 1e-6);
    }
}

TEST_CASE("slip feasibility properties over random parameter sets") {
    std::mt19937_64 eng(20240811);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        ContactParams contact;
        contact.mu_static = 0.08 + 0.9 * u(eng);
        contact.mu_kinetic = contact.mu_static * (0.5 + 0.45 * u(eng));
        contact.grip_preload = 3.0 * u(eng);
        contact.finger_radius = 0.002 + 0.02 * u(eng);
        ObjectGeometry geo = ObjectGeometry::disk(0.05 + 0.1 * u(eng), 0.01 + 0.2 * u(eng), 1.0);
        geo.inertia = geo.plate_inertia();
        ErmParams erm;
        erm.eccentric_mass = (0.1 + u(eng)) * 1e-3;
        erm.link_length = (0.5 + 2.0 * u(eng)) * 1e-3;
        double r = geo.radius * 0.8 * u(eng);

        double wstar = min_slip_frequency(erm, contact, geo, r);
        CAPTURE(trial);
        CHECK_FALSE(slip_feasible(erm.with_frequency(0.99 * wstar), contact, geo, r).feasible);
        CHECK(slip_feasible(erm.with_frequency(1.01 * wstar), contact, geo, r).feasible);

        // Monotone in frequency: feasible stays feasible at higher drive.
        double w1 = wstar * (0.2 + 2.0 * u(eng));
        double w2 = w1 * (1.0 + u(eng));
        if (slip_feasible(erm.with_frequency(w1), contact, geo, r).feasible)
            CHECK(slip_feasible(erm.with_frequency(w2), contact, geo, r).feasible);
    }
}

TEST_CASE("effective_net_force: closed cases and Riemann oracle") {
    ObjectGeometry geo = disk_geometry();
    ContactParams contact = disk_contact();

    SUBCASE("below threshold the force vanishes") {
        double wstar = min_slip_frequency(disk_erm(), contact, geo, 0.02);
        CHECK(effective_net_force(disk_erm(0.9 * wstar), contact, geo, 0.02) == 0.0);
    }
    SUBCASE("frictionless limit recovers the rectified-cosine mean") {
        ContactParams nofric = contact;
        nofric.mu_static = 1e-12;
        nofric.mu_kinetic = 1e-13;
        ErmParams erm = disk_erm();
        double amp = erm.eccentric_mass * erm.link_length * erm.drive_frequency * erm.drive_frequency;
        CHECK(rel_err(effective_net_force(erm, nofric, geo, 0.0), 2.0 / pi * amp) < 1e-6);
    }
    SUBCASE("bundled disk at 168 Hz against a 1e6-point Riemann sum") {
        ErmParams erm = disk_erm();
        double r = 7.75e-3;
        double w = erm.drive_frequency;
        double amp = 0.8e-3 * 3.0e-3 * w * w;
        double hold = 7.0 + 0.05 * 9.81 + 9.81 * 0.05 * r / 10e-3;
        double mu_s = contact.mu_static, mu_k = contact.mu_kinetic;
        long n = 1000000;
        double sum = 0.0;
        for (long i = 0; i < n; ++i) {
            double x = two_pi * (i + 0.5) / n;
            double fv = amp * std::cos(x);
            double fN = hold + amp * std::sin(x);
            if (std::abs(fv) > mu_s * std::abs(fN)) sum += std::abs(fv) - mu_k * fN;
        }
        double oracle = sum / n;
        CHECK(rel_err(effective_net_force(erm, contact, geo, r), oracle) < 1e-5);
    }
    SUBCASE("nondecreasing in frequency above the threshold") {
        std::mt19937_64 eng(77);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            ContactParams c = contact;
            c.mu_static = 0.1 + 0.5 * u(eng);
            c.mu_kinetic = c.mu_static * (0.6 + 0.3 * u(eng));
            double r = 0.04 * u(eng);
            double wstar = min_slip_frequency(disk_erm(), c, geo, r);
            double prev = 0.0;
            for (int k = 1; k <= 8; ++k) {
                double w = wstar * (1.0 + 0.25 * k);
                double f = effective_net_force(disk_erm(w), c, geo, r);
                CHECK(f >= prev - 1e-12);
                prev = f;
            }
        }
    }
}
