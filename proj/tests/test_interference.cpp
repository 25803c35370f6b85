#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "backflow/interference.hpp"
#include "support/test_helpers.hpp"

using namespace backflow;

namespace {

// The 7Li scenario in natural units (a_x = 37.999 um).
constexpr double kD = 2.105307;
constexpr double kT = 6.283185307179586;

WavepacketState li7_packet() {
    return WavepacketState::at_time(InitialProfile::gaussian(), kD, kT);
}

BraggConfig li7_bragg(double varphi = 2.854773) { return BraggConfig(0.49, 3.0 * kD, varphi); }

}  // namespace

TEST_CASE("BraggConfig normalizes amplitudes") {
    const BraggConfig b(0.49, 6.0);
    CHECK(b.a1 == doctest::Approx(std::sqrt(1.0 - 0.49 * 0.49)).epsilon(1e-14));
    CHECK(b.a1 * b.a1 + b.a2 * b.a2 == doctest::Approx(1.0).epsilon(1e-12));

    const BraggConfig c = BraggConfig::from_amplitudes(0.87, 0.49, 6.0);
    CHECK(c.a1 * c.a1 + c.a2 * c.a2 == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(BraggConfig(1.2, 6.0), std::invalid_argument);
    CHECK_THROWS_AS(BraggConfig(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BraggConfig::from_amplitudes(-0.1, 0.5, 6.0), std::invalid_argument);
}

TEST_CASE("total density") {
    const WavepacketState packet = li7_packet();

    SUBCASE("A2 = 0 reduces to the bare envelope density") {
        const BraggConfig none(0.0, 3.0 * kD);
        for (double x : {10.0, 13.0, 15.5}) {
            const double phi = packet.envelope(x);
            CHECK(total_density(x, packet, none) == doctest::Approx(phi * phi).epsilon(1e-14));
        }
    }
    SUBCASE("trough value is |phi|^2 (A1-A2)^2; normalized ~ 0.0786") {
        const BraggConfig bragg = li7_bragg();
        // place x exactly on a trough: qx + phase = pi (mod 2pi), near the center
        const double q = bragg.q;
        const double k_trough = std::round((q * packet.center() + bragg.phase) /
                                           (2.0 * constants::pi));
        const double x_trough =
            (constants::pi + 2.0 * constants::pi * k_trough - bragg.phase) / q;
        const double phi = packet.envelope(x_trough);
        const double expected = phi * phi * (bragg.a1 - bragg.a2) * (bragg.a1 - bragg.a2);
        CHECK(total_density(x_trough, packet, bragg) ==
              doctest::Approx(expected).epsilon(1e-10));

        const double ratio = (bragg.a1 - bragg.a2) * (bragg.a1 - bragg.a2) /
                             ((bragg.a1 + bragg.a2) * (bragg.a1 + bragg.a2));
        CHECK(ratio == doctest::Approx(0.078581).epsilon(1e-4));
    }
    SUBCASE("non-negative everywhere") {
        const BraggConfig bragg = li7_bragg();
        for (int i = -200; i <= 200; ++i) {
            CHECK(total_density(packet.center() + 0.05 * i, packet, bragg) >= 0.0);
        }
    }
}

TEST_CASE("the two current expressions agree to 1e-12 relative") {
    std::mt19937 rng(4u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 3000; ++i) {
        const bool tf = unit(rng) < 0.3;
        const InitialProfile profile =
            tf ? InitialProfile::thomas_fermi(1.0 + 4.0 * unit(rng), 5.0 + 40.0 * unit(rng))
               : InitialProfile::gaussian();
        const WavepacketState packet =
            WavepacketState::at_time(profile, 1.0 + 3.0 * unit(rng), 0.2 + 10.0 * unit(rng));
        const BraggConfig bragg(unit(rng), (0.3 + 6.0 * unit(rng)) * packet.k1,
                                2.0 * constants::pi * unit(rng));
        const double x =
            packet.center() + (2.0 * unit(rng) - 1.0) * 0.9 * packet.envelope_width();
        const double j1 = total_current(x, packet, bragg);
        const double j2 = total_current_from_density(x, packet, bragg);
        const double scale = std::max(std::abs(j1), std::abs(j2));
        if (scale > 0.0) CHECK(std::abs(j1 - j2) <= 1e-12 * scale);
    }
}

TEST_CASE("A2 = 0 current is the single-packet flux") {
    const WavepacketState packet = li7_packet();
    const BraggConfig none(0.0, 3.0 * kD);
    for (double x : {11.0, 13.2, 14.8}) {
        CHECK(total_current(x, packet, none) == doctest::Approx(packet.flux(x)).epsilon(1e-13));
    }
}

TEST_CASE("at the packet center the current reduces to the two-plane-wave form") {
    // grad(theta) = k1 exactly at the center, so the bracket must equal
    // k1 A1^2 + k2 A2^2 + (k1 + k2) A1 A2 cos(qx + phase).
    std::mt19937 rng(9u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const WavepacketState packet = li7_packet();
        const double q = (0.5 + 5.0 * unit(rng)) * packet.k1;
        const BraggConfig bragg(unit(rng), q, 2.0 * constants::pi * unit(rng));
        const double xc = packet.center();
        const double c = std::cos(q * xc + bragg.phase);
        const double k1 = packet.k1, k2 = k1 + q;
        const double plane_wave =
            k1 * bragg.a1 * bragg.a1 + k2 * bragg.a2 * bragg.a2 +
            (k1 + k2) * bragg.a1 * bragg.a2 * c;
        const double phi2 = packet.envelope(xc) * packet.envelope(xc);
        CHECK(total_current(xc, packet, bragg) ==
              doctest::Approx(phi2 * plane_wave).epsilon(1e-12));
    }
}

TEST_CASE("eta") {
    const WavepacketState packet = li7_packet();
    const BraggConfig bragg = li7_bragg();

    SUBCASE("center: eta = 1 + 2/alpha = 5/3 for alpha = 3") {
        CHECK(eta(packet.center(), packet, bragg) ==
              doctest::Approx(5.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("grad theta = -q/2 is the threshold eta = 0") {
        // solve k1 + (bdot/b)(x - center) = -q/2
        const double ratio = packet.scaling.b_dot / packet.scaling.b;
        const double x = packet.center() + (-0.5 * bragg.q - packet.k1) / ratio;
        CHECK(eta(x, packet, bragg) == doctest::Approx(0.0).epsilon(1e-10));
        CHECK(std::abs(packet.phase_gradient(x) + 0.5 * bragg.q) < 1e-10);
    }
    SUBCASE("eta < 0 is tagged classical and rho_crit is undefined") {
        const double ratio = packet.scaling.b_dot / packet.scaling.b;
        const double x = packet.center() + (-0.6 * bragg.q - packet.k1) / ratio;
        CHECK(eta(x, packet, bragg) < 0.0);
        CHECK(!critical_density(x, packet, bragg).has_value());
    }
}

TEST_CASE("critical density") {
    const WavepacketState packet = li7_packet();

    SUBCASE("center value normalized by the crest density ~ 0.168") {
        const BraggConfig bragg = li7_bragg();
        const double xc = packet.center();
        const double crit = *critical_density(xc, packet, bragg);
        const double phi2 = packet.envelope(xc) * packet.envelope(xc);
        const double crest = phi2 * (bragg.a1 + bragg.a2) * (bragg.a1 + bragg.a2);
        CHECK(crit / crest == doctest::Approx(0.168194).epsilon(1e-4));
        // and it matches [alpha/(alpha+2)] (A1-A2)/(A1+A2) exactly
        const double alpha = 3.0;
        CHECK(crit / crest ==
              doctest::Approx(alpha / (alpha + 2.0) * (bragg.a1 - bragg.a2) /
                              (bragg.a1 + bragg.a2))
                  .epsilon(1e-12));
    }
    SUBCASE("A1 = A2 gives a vanishing threshold") {
        const BraggConfig equal(1.0 / std::sqrt(2.0), 3.0 * kD);
        CHECK(*critical_density(packet.center(), packet, equal) ==
              doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("A2 > A1 gives a negative threshold: backflow never flagged, J >= 0") {
        const BraggConfig heavy(0.9, 3.0 * kD, 0.3);
        const double xc = packet.center();
        CHECK(*critical_density(xc, packet, heavy) < 0.0);
        // in the quantum region the equivalence then forces J >= 0
        for (int i = -300; i <= 300; ++i) {
            const double x = xc + 0.02 * i;
            if (eta(x, packet, heavy) > 0.0) {
                CHECK(total_current(x, packet, heavy) >= 0.0);
            }
        }
    }
}

TEST_CASE("pointwise equivalence rho < rho_crit <=> J < 0 in the quantum regime") {
    const WavepacketState packet = li7_packet();
    const BraggConfig bragg = li7_bragg();
    const FieldProfile fp = profile(packet, bragg);
    double j_scale = 0.0;
    for (double j : fp.current) j_scale = std::max(j_scale, std::abs(j));
    for (std::size_t i = 0; i < fp.size(); ++i) {
        if (!(fp.eta[i] > 0.0)) continue;
        if (std::abs(fp.current[i]) < 1e-12 * j_scale) continue;
        CHECK((fp.rho[i] < fp.rho_crit[i]) == (fp.current[i] < 0.0));
    }
}

TEST_CASE("profile grid handling") {
    const WavepacketState packet = li7_packet();
    const BraggConfig bragg = li7_bragg();

    SUBCASE("auto refinement keeps dx <= lambda/40") {
        ProfileGrid grid;
        grid.n_points = 64;  // far too coarse; must be refined
        const FieldProfile fp = profile(packet, bragg, grid);
        CHECK(fp.dx() <= 2.0 * constants::pi / bragg.q / 40.0);
    }
    SUBCASE("fixed grid too coarse is an error") {
        ProfileGrid grid;
        grid.n_points = 64;
        grid.auto_refine = false;
        CHECK_THROWS_WITH_AS(profile(packet, bragg, grid), doctest::Contains("too coarse"),
                             std::invalid_argument);
    }
    SUBCASE("explicit bounds are honored") {
        ProfileGrid grid;
        grid.x_min = packet.center() - 1.0;
        grid.x_max = packet.center() + 1.0;
        const FieldProfile fp = profile(packet, bragg, grid);
        CHECK(fp.x.front() == doctest::Approx(packet.center() - 1.0));
        CHECK(fp.x.back() == doctest::Approx(packet.center() + 1.0));
    }
}

TEST_CASE("fringe geometry of the 7Li profile") {
    const WavepacketState packet = li7_packet();
    const BraggConfig bragg = li7_bragg();
    const FieldProfile fp = profile(packet, bragg);
    const double lambda = 2.0 * constants::pi / bragg.q;

    SUBCASE("adjacent density minima are spaced by lambda (37.8 um)") {
        const auto minima = density_minima(fp);
        REQUIRE(minima.size() > 10);
        for (std::size_t i = 1; i < minima.size(); ++i) {
            CHECK(minima[i] - minima[i - 1] == doctest::Approx(lambda).epsilon(0.01));
        }
        // in SI: lambda = 37.8 um for the 7Li numbers
        CHECK(lambda * 37.999211 == doctest::Approx(37.80).epsilon(1e-3));
    }
    SUBCASE("backflow windows are centered on density minima") {
        const auto windows = backflow_windows(fp, 1e-3);
        const auto minima = density_minima(fp);
        REQUIRE(windows.size() >= 3);
        for (const auto& w : windows) {
            double nearest = 1e9;
            for (double m : minima) nearest = std::min(nearest, std::abs(m - w.x_center));
            CHECK(nearest < 0.05 * lambda);
        }
    }
    SUBCASE("A2 = 0 has no fringes and no backflow windows") {
        const BraggConfig none(0.0, bragg.q);
        const FieldProfile flat = profile(packet, none);
        CHECK(density_minima(flat).empty());
        CHECK(backflow_windows(flat, 1e-3).empty());
    }
}

TEST_CASE("varphi covariance of the fringe factors") {
    const WavepacketState packet = li7_packet();
    const double q = 3.0 * kD;
    std::mt19937 rng(17u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double varphi = 2.0 * constants::pi * unit(rng);
        const double delta = 4.0 * constants::pi * (unit(rng) - 0.5);
        const BraggConfig a(0.49, q, varphi);
        const BraggConfig b(0.49, q, varphi + delta);
        const double x = packet.center() + 3.0 * (unit(rng) - 0.5);
        const double xs = x - delta / q;

        const double phi2_x = packet.envelope(x) * packet.envelope(x);
        const double phi2_s = packet.envelope(xs) * packet.envelope(xs);
        const double rho_factor_a = total_density(x, packet, a) / phi2_x;
        const double rho_factor_b = total_density(xs, packet, b) / phi2_s;
        CHECK(rho_factor_a == doctest::Approx(rho_factor_b).epsilon(1e-12));

        const double kick_a =
            total_current(x, packet, a) / phi2_x - packet.phase_gradient(x) * rho_factor_a;
        const double kick_b =
            total_current(xs, packet, b) / phi2_s - packet.phase_gradient(xs) * rho_factor_b;
        CHECK(kick_a == doctest::Approx(kick_b).epsilon(1e-12));
    }
}
