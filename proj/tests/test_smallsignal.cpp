#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "pfc/smallsignal.hpp"

using namespace pfc;

TEST_CASE("plant pole from the operating point") {
    // 24 V / 4.2 A = 5.714 ohm with 1410 uF -> 19.75 Hz
    const PlantModel p = plant_from_operating_point(1410e-6, 24.0, 4.2, 1.0);
    CHECK(p.pole_hz == doctest::Approx(19.75).epsilon(1e-3));

    SUBCASE("doubling the capacitance halves the pole") {
        const PlantModel p2 = plant_from_operating_point(2820e-6, 24.0, 4.2, 1.0);
        CHECK(p2.pole_hz == doctest::Approx(p.pole_hz / 2.0).epsilon(1e-12));
    }
    SUBCASE("light load moves the pole down") {
        double prev = p.pole_hz;
        for (double i = 2.0; i > 0.01; i /= 2.0) {
            const double f = plant_from_operating_point(1410e-6, 24.0, i, 1.0).pole_hz;
            CHECK(f < prev);
            prev = f;
        }
    }
    SUBCASE("zero load rejected") {
        CHECK_THROWS_AS(plant_from_operating_point(1410e-6, 24.0, 0.0, 1.0),
                        std::domain_error);
    }
}

TEST_CASE("loop gain evaluation") {
    SUBCASE("integrator sized for 100 Hz crossover") {
        PlantModel plant{1.0, 1e9};  // pole far above: effectively flat
        CompensatorModel comp{2.0 * M_PI * 100.0, 0.0, 0.0};
        const auto t = loop_gain_at(plant, comp, 100.0);
        CHECK(std::abs(t) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::arg(t) * 180.0 / M_PI == doctest::Approx(-90.0).epsilon(1e-3));
    }
    SUBCASE("well above the plant pole the plant contributes -90 degrees") {
        PlantModel plant{1.0, 1.0};
        CompensatorModel comp{1.0, 0.0, 0.0};
        const auto t = loop_gain_at(plant, comp, 1e5);
        CHECK(std::arg(t) * 180.0 / M_PI == doctest::Approx(-180.0).epsilon(1e-2));
    }
    SUBCASE("double-pole loop falls 40 dB per decade past crossover") {
        PlantModel plant{1.0, 10.0};
        CompensatorModel comp{2.0 * M_PI * 1000.0, 0.0, 0.0};
        const double f0 = 1000.0;
        const double g1 = std::abs(loop_gain_at(plant, comp, f0));
        const double g2 = std::abs(loop_gain_at(plant, comp, 10.0 * f0));
        CHECK(20.0 * std::log10(g2 / g1) == doctest::Approx(-40.0).epsilon(1e-3));
    }
    SUBCASE("rejects non-positive frequency") {
        CHECK_THROWS_AS(loop_gain_at(PlantModel{}, CompensatorModel{}, 0.0),
                        std::domain_error);
    }
}

TEST_CASE("phase margin landmarks") {
    SUBCASE("pure integrator gives 90 degrees") {
        PlantModel plant{1.0, 1e12};
        CompensatorModel comp{2.0 * M_PI * 100.0, 0.0, 0.0};
        const StabilityResult r = phase_margin(plant, comp, 1.0, 10e3);
        CHECK(r.crossover_hz == doctest::Approx(100.0).epsilon(1e-3));
        CHECK(r.phase_margin_deg == doctest::Approx(90.0).epsilon(0.01 / 90.0));
        CHECK(r.stable);
    }
    SUBCASE("coincident pole at crossover gives 45 degrees") {
        // With the pole at the crossover the magnitude there is 1/sqrt(2); the
        // integrator gain must compensate for |T| = 1 at the pole frequency.
        const double fc = 100.0;
        PlantModel plant{1.0, fc};
        CompensatorModel comp{2.0 * M_PI * fc * std::sqrt(2.0), 0.0, 0.0};
        const StabilityResult r = phase_margin(plant, comp, 1.0, 10e3);
        CHECK(r.crossover_hz == doctest::Approx(fc).epsilon(1e-3));
        CHECK(r.phase_margin_deg == doctest::Approx(45.0).epsilon(0.1 / 45.0));
    }
    SUBCASE("output pole at 19.75 Hz with a 10 Hz crossover") {
        const PlantModel plant = plant_from_operating_point(1410e-6, 24.0, 4.2, 1.0);
        const double f_bw = 10.0;
        const double mag_at_bw =
            std::abs(plant.dc_gain /
                     std::complex<double>(1.0, f_bw / plant.pole_hz));
        CompensatorModel comp{2.0 * M_PI * f_bw / mag_at_bw, 0.0, 0.0};
        const StabilityResult r = phase_margin(plant, comp, 1.0, 10e3);
        CHECK(r.crossover_hz == doctest::Approx(10.0).epsilon(1e-3));
        // 180 - 90 - atan(10/19.75) = 63.15
        CHECK(r.phase_margin_deg == doctest::Approx(63.15).epsilon(1e-3));
    }
    SUBCASE("no crossover is an error") {
        PlantModel plant{1e-3, 100.0};
        CompensatorModel comp{1e-3, 0.0, 0.0};
        CHECK_THROWS_WITH_AS(phase_margin(plant, comp, 1.0, 10e3),
                             "no crossover in range", std::domain_error);
    }
}

TEST_CASE("integrator loops have monotone gain and a unique crossover") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> pole(5.0, 500.0);
    std::uniform_real_distribution<double> gain(10.0, 10000.0);
    for (int trial = 0; trial < 50; ++trial) {
        PlantModel plant{1.0, pole(rng)};
        CompensatorModel comp{gain(rng), 0.0, 0.0};
        double prev = std::abs(loop_gain_at(plant, comp, 0.5));
        for (double f = 1.0; f < 2e4; f *= 1.3) {
            const double g = std::abs(loop_gain_at(plant, comp, f));
            CHECK(g < prev);
            prev = g;
        }
    }
}

TEST_CASE("gain scaling moves the crossover but not the phase curve") {
    PlantModel plant{4.0, 30.0};
    CompensatorModel comp{500.0, 0.0, 0.0};
    PlantModel scaled = plant;
    scaled.dc_gain *= 7.5;
    for (double f = 1.0; f < 1e4; f *= 3.0) {
        const auto a = loop_gain_at(plant, comp, f);
        const auto b = loop_gain_at(scaled, comp, f);
        CHECK(std::abs(b) == doctest::Approx(7.5 * std::abs(a)).epsilon(1e-12));
        CHECK(std::arg(b) == doctest::Approx(std::arg(a)).epsilon(1e-12));
    }
}
