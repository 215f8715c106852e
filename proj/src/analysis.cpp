#include "pfc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pfc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kPi = 3.141592653589793;

// IEC 61000-3-2 Class D limits in mA per watt of input power, odd harmonics.
double class_d_ma_per_watt(int h) {
    switch (h) {
        case 3: return 3.4;
        case 5: return 1.9;
        case 7: return 1.0;
        case 9: return 0.5;
        case 11: return 0.35;
        case 13: return 0.2962;
        default: return 3.85 / h;  // 15..39
    }
}

void check_strictly_increasing(const std::vector<TimePoint>& s) {
    for (size_t k = 1; k < s.size(); ++k) {
        if (s[k].t <= s[k - 1].t)
            throw std::invalid_argument("timestamps must be strictly increasing");
    }
}

// Zero-order-hold lookup over per-cycle trace samples, advancing j as t grows.
double zoh(const std::vector<TimePoint>& s, double t, size_t& j) {
    while (j + 1 < s.size() && s[j + 1].t <= t) ++j;
    return s[j].value;
}

}  // namespace

HarmonicSpectrum fourier_harmonics(const WaveformSeries& w, int h_max) {
    if (h_max < 1) throw std::invalid_argument("h_max must be >= 1");
    const size_t n = w.samples.size();
    if (n < 2) throw std::invalid_argument("insufficient samples");
    check_strictly_increasing(w.samples);
    if (w.f_fundamental <= 0.0)
        throw std::invalid_argument("f_fundamental must be positive");

    const double dt =
        (w.samples.back().t - w.samples.front().t) / static_cast<double>(n - 1);
    for (size_t k = 1; k < n; ++k) {
        const double step = w.samples[k].t - w.samples[k - 1].t;
        if (std::fabs(step - dt) > 1e-3 * dt)
            throw std::invalid_argument("requires uniform sampling");
    }

    // The window is the n samples each owning one dt of signal.
    const double window = n * dt;
    const double periods = window * w.f_fundamental;
    const double rounded = std::round(periods);
    if (rounded < 1.0 || std::fabs(periods - rounded) > 1e-6 * std::max(1.0, periods))
        throw std::invalid_argument("window not integer periods");
    const int n_cyc = static_cast<int>(rounded);

    if (static_cast<double>(n) / n_cyc < 2.0 * h_max + 1.0)
        throw std::invalid_argument("insufficient samples");

    HarmonicSpectrum spec;
    spec.f_fundamental = w.f_fundamental;
    spec.rms.resize(h_max, 0.0);

    long double dc = 0.0L;
    for (size_t k = 0; k < n; ++k) dc += w.samples[k].value;
    spec.dc = static_cast<double>(dc / n);

    for (int h = 1; h <= h_max; ++h) {
        long double s = 0.0L, c = 0.0L;
        const double omega = 2.0 * kPi * h * n_cyc / static_cast<double>(n);
        for (size_t k = 0; k < n; ++k) {
            s += w.samples[k].value * std::sin(omega * k);
            c += w.samples[k].value * std::cos(omega * k);
        }
        const double as = static_cast<double>(2.0L * s / n);
        const double ac = static_cast<double>(2.0L * c / n);
        spec.rms[h - 1] = std::hypot(as, ac) / kSqrt2;
    }
    return spec;
}

PowerResult power_factor(const WaveformSeries& v, const WaveformSeries& i) {
    const size_t n = v.samples.size();
    if (n < 2 || i.samples.size() != n)
        throw std::invalid_argument("voltage and current need a common window");

    long double p = 0.0L, vv = 0.0L, ii = 0.0L;
    for (size_t k = 0; k < n; ++k) {
        const double vs = v.samples[k].value;
        const double is = i.samples[k].value;
        p += vs * is;
        vv += vs * vs;
        ii += is * is;
    }
    const double rms_v = std::sqrt(static_cast<double>(vv / n));
    const double rms_i = std::sqrt(static_cast<double>(ii / n));
    if (rms_v <= 0.0 || rms_i <= 0.0)
        throw std::invalid_argument("zero-RMS waveform");

    PowerResult res;
    res.p_in = static_cast<double>(p / n);
    res.s_in = rms_v * rms_i;
    res.pf = res.p_in / res.s_in;
    return res;
}

double thd(const HarmonicSpectrum& spec) {
    if (spec.rms.empty() || spec.rms[0] <= 0.0)
        throw std::invalid_argument("zero fundamental");
    long double sum = 0.0L;
    for (size_t k = 1; k < spec.rms.size(); ++k)
        sum += static_cast<long double>(spec.rms[k]) * spec.rms[k];
    return std::sqrt(static_cast<double>(sum)) / spec.rms[0];
}

std::vector<std::pair<int, double>> iec_class_d_limits(double p_in) {
    if (p_in <= 0.0) throw std::invalid_argument("p_in must be positive");
    std::vector<std::pair<int, double>> limits;
    for (int h = 3; h <= 39; h += 2)
        limits.emplace_back(h, class_d_ma_per_watt(h) * p_in / 1000.0);
    return limits;
}

IecReport iec_check(const HarmonicSpectrum& spec, double p_in) {
    if (spec.rms.size() < 39)
        throw std::invalid_argument("spectrum must extend to harmonic 39");
    IecReport report;
    report.p_in = p_in;
    report.in_scope = p_in >= 75.0 && p_in <= 600.0;
    report.overall_pass = true;
    for (const auto& [h, limit_a] : iec_class_d_limits(p_in)) {
        IecRow row;
        row.harmonic = h;
        row.limit_mA_per_W = class_d_ma_per_watt(h);
        row.limit_A = limit_a;
        row.measured_A = spec.rms[h - 1];
        row.pass = row.measured_A <= row.limit_A;
        report.overall_pass = report.overall_pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

WaveformSeries line_current_waveform(const SimTrace& trace) {
    if (trace.cycles.empty() || trace.i_in_samples.empty())
        throw std::invalid_argument("empty trace");
    const double f = trace.f_line;
    const double t0 = trace.i_in_samples.front().t;
    const double t_end =
        trace.cycles.back().t_start + trace.cycles.back().period;
    // The recorded window may stop a few switching periods short of a whole
    // line cycle; round within 1% and hold the last sample over the gap.
    const int n_cyc = static_cast<int>(std::floor((t_end - t0) * f + 0.01));
    if (n_cyc < 1)
        throw std::invalid_argument("trace must span at least one line cycle");

    const int n = std::max(2048 * n_cyc, 4096);
    const double window = n_cyc / f;

    WaveformSeries w;
    w.uniform = true;
    w.f_fundamental = f;
    w.samples.reserve(n);
    size_t j = 0;
    for (int k = 0; k < n; ++k) {
        const double t = t0 + window * k / n;
        const double rectified = zoh(trace.i_in_samples, t, j);
        const double sgn = std::sin(2.0 * kPi * f * t) >= 0.0 ? 1.0 : -1.0;
        w.samples.push_back({t, rectified * sgn});
    }
    return w;
}

LineMetrics aggregate_metrics(const SimTrace& trace, double v_line_rms,
                              double i_load) {
    if (trace.cycles.empty())
        throw std::invalid_argument("empty trace");
    const double f = trace.f_line;
    const double span = trace.cycles.back().t_start +
                        trace.cycles.back().period -
                        trace.cycles.front().t_start;
    if (span * f < 2.0 - 0.01)
        throw std::invalid_argument("trace must span at least 2 line cycles");
    const WaveformSeries iw = line_current_waveform(trace);

    WaveformSeries vw;
    vw.uniform = true;
    vw.f_fundamental = f;
    vw.samples.reserve(iw.samples.size());
    for (const auto& s : iw.samples) {
        vw.samples.push_back(
            {s.t, kSqrt2 * v_line_rms * std::sin(2.0 * kPi * f * s.t)});
    }

    const PowerResult pr = power_factor(vw, iw);
    const HarmonicSpectrum spec = fourier_harmonics(iw, 40);

    LineMetrics m;
    m.p_in = pr.p_in;
    m.s_in = pr.s_in;
    m.pf = pr.pf;
    m.i_thd = thd(spec);
    m.settled = trace.settled;

    // Output voltage statistics over the same window.
    size_t j = 0;
    long double v_sum = 0.0L;
    double v_min = trace.v_out_samples.front().value;
    double v_max = v_min;
    for (const auto& s : iw.samples) {
        const double v = zoh(trace.v_out_samples, s.t, j);
        v_sum += v;
        v_min = std::min(v_min, v);
        v_max = std::max(v_max, v);
    }
    m.v_out_mean = static_cast<double>(v_sum / iw.samples.size());
    m.v_ripple_pp = v_max - v_min;
    m.p_out = m.v_out_mean * i_load;
    m.efficiency = m.p_in > 0.0 ? m.p_out / m.p_in : 0.0;

    bool first = true;
    for (const auto& c : trace.cycles) {
        if (!c.switched) continue;
        const double f_sw = 1.0 / c.period;
        if (first) {
            m.f_sw_min = m.f_sw_max = f_sw;
            first = false;
        } else {
            m.f_sw_min = std::min(m.f_sw_min, f_sw);
            m.f_sw_max = std::max(m.f_sw_max, f_sw);
        }
    }
    return m;
}

WaveformSeries read_waveform_csv(const std::string& path, double f_fundamental) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    WaveformSeries w;
    w.f_fundamental = f_fundamental;
    std::string line;
    bool first_line = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string t_str, v_str;
        if (!std::getline(row, t_str, ',') || !std::getline(row, v_str, ',')) {
            if (first_line) { first_line = false; continue; }
            throw std::runtime_error("malformed CSV row: " + line);
        }
        try {
            const double t = std::stod(t_str);
            const double v = std::stod(v_str);
            w.samples.push_back({t, v});
        } catch (const std::exception&) {
            if (first_line) { first_line = false; continue; }  // header row
            throw std::runtime_error("malformed CSV row: " + line);
        }
        first_line = false;
    }
    if (w.samples.size() < 2) throw std::runtime_error("CSV has too few samples");
    check_strictly_increasing(w.samples);

    const double dt = (w.samples.back().t - w.samples.front().t) /
                      static_cast<double>(w.samples.size() - 1);
    w.uniform = true;
    for (size_t k = 1; k < w.samples.size(); ++k) {
        if (std::fabs(w.samples[k].t - w.samples[k - 1].t - dt) > 1e-3 * dt) {
            w.uniform = false;
            break;
        }
    }
    return w;
}

std::string format_iec_report(const IecReport& report) {
    char buf[128];
    std::string out;
    std::snprintf(buf, sizeof(buf), "IEC 61000-3-2 Class D check at Pin = %.2f W%s\n",
                  report.p_in, report.in_scope ? "" : " (advisory: outside 75-600 W)");
    out += buf;
    out += "  h   limit mA/W     limit A  measured A  result\n";
    for (const auto& r : report.rows) {
        std::snprintf(buf, sizeof(buf), " %2d       %6.4f   %9.5f   %9.5f    %s\n",
                      r.harmonic, r.limit_mA_per_W, r.limit_A, r.measured_A,
                      r.pass ? "pass" : "FAIL");
        out += buf;
    }
    out += report.overall_pass ? "overall: PASS\n" : "overall: FAIL\n";
    return out;
}

}  // namespace pfc
