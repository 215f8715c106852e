#include "pfc/design.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pfc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::domain_error(what);
}

}  // namespace

void DesignSpec::validate() const {
    require(vac_min > 0.0, "vac_min must be positive");
    require(vac_max >= vac_min, "vac_max must be >= vac_min");
    require(d_max > 0.0 && d_max < 1.0, "d_max must be in (0, 1)");
    require(eta_target > 0.0 && eta_target <= 1.0, "eta_target must be in (0, 1]");
    require(v_out > 0.0, "v_out must be positive");
    require(i_out > 0.0, "i_out must be positive");
    require(f_line_min > 0.0, "f_line_min must be positive");
    require(f_sw_min > 0.0, "f_sw_min must be positive");
    require(v_ripple > 0.0, "v_ripple must be positive");
}

double primary_inductance(const DesignSpec& spec, double p_out_max) {
    spec.validate();
    require(p_out_max > 0.0, "p_out_max must be positive");
    return spec.vac_min * spec.vac_min * spec.eta_target * spec.d_max * spec.d_max /
           (kSqrt2 * p_out_max * spec.f_sw_min);
}

double turns_ratio_secondary(const DesignSpec& spec) {
    require(spec.d_max > 0.0 && spec.d_max < 1.0, "d_max must be in (0, 1)");
    require(spec.vac_min > 0.0, "vac_min must be positive");
    return (spec.v_out + spec.v_f_diode) / (kSqrt2 * spec.vac_min) *
           (1.0 - spec.d_max) / spec.d_max;
}

double turns_ratio_aux_primary(const DesignSpec& spec) {
    require(spec.d_max > 0.0 && spec.d_max < 1.0, "d_max must be in (0, 1)");
    require(spec.vac_min > 0.0, "vac_min must be positive");
    return (spec.v_aux_max + spec.v_f_diode) / (kSqrt2 * spec.vac_min) *
           (1.0 - spec.d_max) / spec.d_max;
}

double turns_ratio_aux_secondary(const DesignSpec& spec) {
    require(spec.v_out + spec.v_f_diode != 0.0, "v_out + v_f_diode must be nonzero");
    return (spec.v_aux_max + spec.v_f_diode) / (spec.v_out + spec.v_f_diode);
}

double output_capacitance(const DesignSpec& spec) {
    require(spec.f_line_min > 0.0 && spec.v_ripple > 0.0,
            "f_line_min and v_ripple must be positive");
    return spec.i_out / (2.0 * M_PI * spec.f_line_min * spec.v_ripple);
}

double peak_primary_current(const DesignSpec& spec, double p_out_max, double l_primary) {
    require(l_primary > 0.0, "l_primary must be positive");
    require(p_out_max > 0.0, "p_out_max must be positive");
    require(spec.eta_target > 0.0, "eta_target must be positive");
    require(spec.f_sw_min > 0.0, "f_sw_min must be positive");
    return std::sqrt(2.0 * (p_out_max / spec.eta_target) / (l_primary * spec.f_sw_min));
}

double snubber_resistor(const DesignSpec& spec, double l_leak, double i_peak,
                        double v_reflected, double f_sw) {
    const double v_sn = spec.v_clamp > 0.0 ? spec.v_clamp : 2.0 * v_reflected;
    require(v_sn > v_reflected, "v_clamp must exceed the reflected output voltage");
    require(l_leak > 0.0 && i_peak > 0.0 && f_sw > 0.0,
            "l_leak, i_peak and f_sw must be positive");
    const double e_leak = 0.5 * l_leak * i_peak * i_peak;
    return v_sn * v_sn / (e_leak * (v_sn / (v_sn - v_reflected)) * f_sw);
}

double snubber_capacitor(const DesignSpec& spec, double r_snubber, double f_sw) {
    const double v_sn = spec.v_clamp;
    require(v_sn > 0.0, "v_clamp must be positive");
    const double dv = spec.delta_v_clamp > 0.0 ? spec.delta_v_clamp : 0.1 * v_sn;
    require(dv > 0.0 && r_snubber > 0.0 && f_sw > 0.0,
            "delta_v_clamp, r_snubber and f_sw must be positive");
    return v_sn / (dv * r_snubber * f_sw);
}

DesignOutput full_design(const DesignSpec& spec, double p_out_max, double l_leak) {
    spec.validate();
    require(p_out_max > 0.0, "p_out_max must be positive");

    DesignOutput out;
    out.l_primary = primary_inductance(spec, p_out_max);
    out.n_sp = turns_ratio_secondary(spec);
    out.n_ap = turns_ratio_aux_primary(spec);
    out.n_as = turns_ratio_aux_secondary(spec);
    out.c_out = output_capacitance(spec);
    out.p_in_max = p_out_max / spec.eta_target;
    out.i_peak_primary = peak_primary_current(spec, p_out_max, out.l_primary);

    if (l_leak <= 0.0) l_leak = out.l_primary * (3.75 / 160.0);
    const double v_reflected = spec.v_out / out.n_sp;

    DesignSpec snub = spec;
    if (snub.v_clamp <= 0.0) snub.v_clamp = 2.0 * v_reflected;
    out.r_snubber = snubber_resistor(snub, l_leak, out.i_peak_primary,
                                     v_reflected, spec.f_sw_min);
    out.c_snubber = snubber_capacitor(snub, out.r_snubber, spec.f_sw_min);
    return out;
}

}  // namespace pfc
