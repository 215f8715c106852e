#pragma once

#include <complex>

namespace pfc {

// First-order control-to-output model: dc_gain / (1 + s / (2 pi pole_hz)).
struct PlantModel {
    double dc_gain = 1.0;
    double pole_hz = 1.0;
};

// Type-2 shape: integrator with optional zero and high-frequency pole.
// zero_hz or pole_hz of 0 disables that term.
struct CompensatorModel {
    double integrator_gain = 1.0;  // 1/seconds
    double zero_hz = 0.0;
    double pole_hz = 0.0;
};

struct StabilityResult {
    double crossover_hz = 0.0;
    double phase_margin_deg = 0.0;
    double gain_margin_db = 0.0;  // 0 when the phase never reaches -180 deg
    bool stable = false;
};

// Output pole from the load resistance and output capacitance at the
// operating point. Throws std::domain_error for i_load <= 0.
PlantModel plant_from_operating_point(double c_out, double v_out, double i_load,
                                      double modulator_gain);

// Loop transmission T(j 2 pi f) = plant x compensator.
std::complex<double> loop_gain_at(const PlantModel& plant,
                                  const CompensatorModel& comp, double f);

// Locates |T| = 1 by bisection over [f_min, f_max] to 0.01% in frequency.
// Throws std::domain_error if the crossover is not bracketed or |T| is
// non-monotonic across the bracket.
StabilityResult phase_margin(const PlantModel& plant, const CompensatorModel& comp,
                             double f_min = 1.0, double f_max = 10e3);

}  // namespace pfc
