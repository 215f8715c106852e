#include "pfc/smallsignal.hpp"

#include <cmath>
#include <stdexcept>

namespace pfc {

namespace {

constexpr double kPi = 3.141592653589793;

double wrap_phase_deg(std::complex<double> t) {
    return std::arg(t) * 180.0 / kPi;
}

}  // namespace

PlantModel plant_from_operating_point(double c_out, double v_out, double i_load,
                                      double modulator_gain) {
    if (i_load <= 0.0) throw std::domain_error("i_load must be positive");
    if (c_out <= 0.0) throw std::domain_error("c_out must be positive");
    if (v_out <= 0.0) throw std::domain_error("v_out must be positive");
    const double r_load = v_out / i_load;
    PlantModel plant;
    plant.pole_hz = 1.0 / (2.0 * kPi * r_load * c_out);
    plant.dc_gain = modulator_gain * r_load;
    return plant;
}

std::complex<double> loop_gain_at(const PlantModel& plant,
                                  const CompensatorModel& comp, double f) {
    if (f <= 0.0) throw std::domain_error("f must be positive");
    const std::complex<double> s(0.0, 2.0 * kPi * f);

    std::complex<double> t =
        plant.dc_gain / (1.0 + s / (2.0 * kPi * plant.pole_hz));
    t *= comp.integrator_gain / s;
    if (comp.zero_hz > 0.0) t *= 1.0 + s / (2.0 * kPi * comp.zero_hz);
    if (comp.pole_hz > 0.0) t /= 1.0 + s / (2.0 * kPi * comp.pole_hz);
    return t;
}

StabilityResult phase_margin(const PlantModel& plant, const CompensatorModel& comp,
                             double f_min, double f_max) {
    if (!(f_min > 0.0 && f_max > f_min))
        throw std::domain_error("need 0 < f_min < f_max");

    const double g_lo = std::abs(loop_gain_at(plant, comp, f_min));
    const double g_hi = std::abs(loop_gain_at(plant, comp, f_max));
    if (!(g_lo > 1.0 && g_hi < 1.0))
        throw std::domain_error("no crossover in range");

    // A second sign change of |T|-1 on a log sweep means multiple crossovers.
    {
        const int n = 200;
        int crossings = 0;
        double prev = g_lo;
        for (int k = 1; k <= n; ++k) {
            const double f = f_min * std::pow(f_max / f_min, k / double(n));
            const double g = std::abs(loop_gain_at(plant, comp, f));
            if ((prev > 1.0) != (g > 1.0)) ++crossings;
            prev = g;
        }
        if (crossings > 1) throw std::domain_error("multiple crossovers");
    }

    double lo = f_min, hi = f_max;
    while ((hi - lo) > 1e-4 * lo) {
        const double mid = std::sqrt(lo * hi);
        (std::abs(loop_gain_at(plant, comp, mid)) > 1.0 ? lo : hi) = mid;
    }

    StabilityResult res;
    res.crossover_hz = std::sqrt(lo * hi);
    res.phase_margin_deg =
        180.0 + wrap_phase_deg(loop_gain_at(plant, comp, res.crossover_hz));

    // Gain margin at the -180 deg phase crossing, when one exists in range.
    double f_prev = f_min;
    double ph_prev = wrap_phase_deg(loop_gain_at(plant, comp, f_min));
    for (int k = 1; k <= 400; ++k) {
        const double f = f_min * std::pow(f_max / f_min, k / 400.0);
        const double ph = wrap_phase_deg(loop_gain_at(plant, comp, f));
        if (ph_prev > -180.0 && ph <= -180.0) {
            const double g = std::abs(loop_gain_at(plant, comp, 0.5 * (f_prev + f)));
            res.gain_margin_db = -20.0 * std::log10(g);
            break;
        }
        f_prev = f;
        ph_prev = ph;
    }

    res.stable = res.phase_margin_deg > 0.0;
    return res;
}

}  // namespace pfc
