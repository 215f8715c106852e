#pragma once

#include <string>

namespace pfc {

// Electrical requirements driving the closed-form design equations.
// All quantities in SI base units.
struct DesignSpec {
    double vac_min = 85.0;        // volts RMS
    double vac_max = 264.0;       // volts RMS
    double v_out = 24.0;          // volts DC
    double i_out = 4.2;           // amperes DC
    double f_line_min = 60.0;     // hertz
    double f_sw_min = 70e3;       // hertz
    double d_max = 0.5;           // duty ratio
    double eta_target = 0.88;     // efficiency used in the inductance equation
    double v_f_diode = 0.7;       // rectifier forward drop, volts
    double v_ripple = 2.0;        // allowed output ripple, volts peak-peak
    double v_aux_max = 19.9;      // auxiliary supply target, volts
    double v_clamp = 0.0;         // snubber clamp target; 0 = auto (2x reflected)
    double delta_v_clamp = 0.0;   // allowed clamp ripple; 0 = auto (10% of v_clamp)

    void validate() const;  // throws std::domain_error naming the offending field
};

// Result of composing the design equations.
struct DesignOutput {
    double l_primary = 0.0;       // henries
    double n_sp = 0.0;            // Ns/Np
    double n_ap = 0.0;            // Na/Np
    double n_as = 0.0;            // Na/Ns
    double c_out = 0.0;           // farads
    double r_snubber = 0.0;       // ohms
    double c_snubber = 0.0;       // farads
    double i_peak_primary = 0.0;  // amperes
    double p_in_max = 0.0;        // watts
};

// The published 100 W reference board. Values fixed by the build, not derived.
struct ReferenceDesign {
    double vac_min = 85.0;
    double vac_max = 264.0;
    double v_out = 24.0;
    double i_out = 4.2;
    double f_line = 60.0;
    double f_sw_min = 70e3;
    double l_primary = 160e-6;
    double l_leakage = 3.75e-6;
    int turns_primary = 40;
    int turns_secondary = 6;
    int turns_aux = 5;
    int turns_secondary2 = 3;   // present on the board, no governing equation
    double d_max = 0.5;
    double v_ripple = 2.0;
    double n_sp = 0.15;         // 6/40
    double i_peak = 4.54;
    double c_out = 1410e-6;
    double r_snubber = 75e3;
    double c_snubber = 2.2e-9;
    double r_dson_primary = 0.36;     // IPD80R360P7S
    double r_dson_secondary = 7.3e-3; // IPB073N15N5
};

// Eq.-level operations. Each throws std::domain_error on invalid input.
double primary_inductance(const DesignSpec& spec, double p_out_max);
double turns_ratio_secondary(const DesignSpec& spec);
double turns_ratio_aux_primary(const DesignSpec& spec);
double turns_ratio_aux_secondary(const DesignSpec& spec);
double output_capacitance(const DesignSpec& spec);
double peak_primary_current(const DesignSpec& spec, double p_out_max, double l_primary);
double snubber_resistor(const DesignSpec& spec, double l_leak, double i_peak,
                        double v_reflected, double f_sw);
double snubber_capacitor(const DesignSpec& spec, double r_snubber, double f_sw);

// Runs every equation in dependency order. l_leak <= 0 scales the reference
// board's leakage fraction (3.75/160) from the computed primary inductance.
DesignOutput full_design(const DesignSpec& spec, double p_out_max, double l_leak = 0.0);

}  // namespace pfc
