#pragma once

#include <string>
#include <vector>

#include "pfc/sim.hpp"

namespace pfc {

// Sampled signal. `uniform` promises equal spacing; f_fundamental is the line
// frequency the harmonic analysis is referenced to.
struct WaveformSeries {
    std::vector<TimePoint> samples;
    bool uniform = true;
    double f_fundamental = 60.0;
};

// RMS magnitude per harmonic, rms[k] holding harmonic h = k + 1.
struct HarmonicSpectrum {
    double f_fundamental = 60.0;
    std::vector<double> rms;
    double dc = 0.0;
};

struct LineMetrics {
    double p_in = 0.0;        // watts
    double s_in = 0.0;        // volt-amperes
    double pf = 0.0;
    double i_thd = 0.0;       // fraction
    double p_out = 0.0;       // watts
    double efficiency = 0.0;  // fraction
    double v_ripple_pp = 0.0; // volts
    double f_sw_min = 0.0;    // hertz
    double f_sw_max = 0.0;    // hertz
    double v_out_mean = 0.0;  // volts
    bool settled = true;      // false = metrics from an unsettled trace
};

struct IecRow {
    int harmonic = 0;
    double limit_mA_per_W = 0.0;
    double limit_A = 0.0;
    double measured_A = 0.0;
    bool pass = false;
};

struct IecReport {
    double p_in = 0.0;
    std::vector<IecRow> rows;   // odd harmonics 3..39
    bool overall_pass = false;
    bool in_scope = true;       // false outside the 75-600 W applicability range
};

struct PowerResult {
    double pf = 0.0;
    double p_in = 0.0;
    double s_in = 0.0;
};

// Discrete Fourier projection onto sin/cos at h * f_fundamental, h = 1..h_max.
// Requires an integer-period window and at least 2*h_max + 1 samples per
// period. Throws std::invalid_argument otherwise.
HarmonicSpectrum fourier_harmonics(const WaveformSeries& w, int h_max);

// Real power, apparent power and their ratio over a common window.
PowerResult power_factor(const WaveformSeries& v, const WaveformSeries& i);

// Total harmonic distortion relative to the fundamental.
double thd(const HarmonicSpectrum& spec);

// IEC 61000-3-2 Class D odd-harmonic current limits in amperes at the given
// input power. Returned as (harmonic, limit_A) pairs for h = 3, 5, ..., 39.
std::vector<std::pair<int, double>> iec_class_d_limits(double p_in);

IecReport iec_check(const HarmonicSpectrum& spec, double p_in);

// Reduces a settled trace to the table-row metrics over whole line cycles.
LineMetrics aggregate_metrics(const SimTrace& trace, double v_line_rms,
                              double i_load);

// Signed line-side current reconstructed from the trace's rectified
// per-cycle averages, resampled uniformly over whole line cycles.
WaveformSeries line_current_waveform(const SimTrace& trace);

// CSV with columns time_s,value (header row optional).
WaveformSeries read_waveform_csv(const std::string& path, double f_fundamental);

// Aligned-column harmonic-vs-limit table.
std::string format_iec_report(const IecReport& report);

}  // namespace pfc
