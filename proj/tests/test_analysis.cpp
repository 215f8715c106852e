#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <stdexcept>

#include "pfc/analysis.hpp"
#include "pfc/sim.hpp"

using namespace pfc;

namespace {

constexpr double kF = 60.0;

WaveformSeries sampled(int n, int n_cyc, double f,
                       const std::function<double(double)>& fn) {
    WaveformSeries w;
    w.f_fundamental = f;
    const double window = n_cyc / f;
    for (int k = 0; k < n; ++k) {
        const double t = window * k / n;
        w.samples.push_back({t, fn(t)});
    }
    return w;
}

// Independent projection using per-sample timestamps and extended precision.
double oracle_rms(const WaveformSeries& w, int h) {
    long double s = 0.0L, c = 0.0L;
    const size_t n = w.samples.size();
    for (size_t k = 0; k < n; ++k) {
        const long double ang =
            2.0L * M_PIl * h * w.f_fundamental * w.samples[k].t;
        s += w.samples[k].value * sinl(ang);
        c += w.samples[k].value * cosl(ang);
    }
    return static_cast<double>(
        sqrtl((2.0L * s / n) * (2.0L * s / n) + (2.0L * c / n) * (2.0L * c / n)) /
        sqrtl(2.0L));
}

}  // namespace

TEST_CASE("pure sine projects onto the fundamental only") {
    const auto w = sampled(1024, 1, kF,
                           [](double t) { return std::sin(2.0 * M_PI * kF * t); });
    const HarmonicSpectrum s = fourier_harmonics(w, 15);
    CHECK(s.rms[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    for (int h = 2; h <= 15; ++h) CHECK(s.rms[h - 1] < 1e-9);
    CHECK(std::fabs(s.dc) < 1e-12);
}

TEST_CASE("third harmonic ratio is recovered exactly") {
    const auto w = sampled(1024, 1, kF, [](double t) {
        return std::sin(2.0 * M_PI * kF * t) + 0.1 * std::sin(6.0 * M_PI * kF * t);
    });
    const HarmonicSpectrum s = fourier_harmonics(w, 5);
    CHECK(s.rms[2] / s.rms[0] == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("random band-limited spectra match the brute-force oracle") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> amp(0.0, 2.0);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    for (int trial = 0; trial < 100; ++trial) {
        double a[13], p[13];
        for (int h = 0; h <= 12; ++h) { a[h] = amp(rng); p[h] = ph(rng); }
        const auto w = sampled(512, 1, kF, [&](double t) {
            double v = a[0];
            for (int h = 1; h <= 12; ++h)
                v += a[h] * std::sin(2.0 * M_PI * h * kF * t + p[h]);
            return v;
        });
        const HarmonicSpectrum s = fourier_harmonics(w, 12);
        for (int h = 1; h <= 12; ++h) {
            CHECK(std::fabs(s.rms[h - 1] - oracle_rms(w, h)) <= 1e-9);
            CHECK(s.rms[h - 1] ==
                  doctest::Approx(a[h] / std::sqrt(2.0)).epsilon(1e-9));
        }
    }
}

TEST_CASE("parseval consistency") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> amp(0.1, 1.0);
    double a[6];
    for (double& x : a) x = amp(rng);
    const auto w = sampled(2048, 2, kF, [&](double t) {
        double v = 0.3;  // dc
        for (int h = 1; h <= 5; ++h)
            v += a[h] * std::sin(2.0 * M_PI * h * kF * t + 0.3 * h);
        return v;
    });
    const HarmonicSpectrum s = fourier_harmonics(w, 10);
    long double ms = 0.0L;
    for (const auto& q : w.samples) ms += q.value * q.value;
    ms /= w.samples.size();
    long double sum = s.dc * s.dc;
    for (double r : s.rms) sum += r * r;
    CHECK(static_cast<double>(sum) ==
          doctest::Approx(static_cast<double>(ms)).epsilon(1e-3));
}

TEST_CASE("fourier input validation") {
    auto w = sampled(1000, 1, kF,
                     [](double t) { return std::sin(2.0 * M_PI * kF * t); });
    SUBCASE("window must be whole periods") {
        w.samples.resize(700);  // truncated window
        CHECK_THROWS_WITH_AS(fourier_harmonics(w, 5), "window not integer periods",
                             std::invalid_argument);
    }
    SUBCASE("needs enough samples per period") {
        CHECK_THROWS_WITH_AS(fourier_harmonics(w, 500), "insufficient samples",
                             std::invalid_argument);
    }
    SUBCASE("timestamps must increase") {
        std::swap(w.samples[10].t, w.samples[11].t);
        CHECK_THROWS_AS(fourier_harmonics(w, 5), std::invalid_argument);
    }
}

TEST_CASE("power factor of clean and shifted sines") {
    const auto v = sampled(4096, 1, kF, [](double t) {
        return 170.0 * std::sin(2.0 * M_PI * kF * t);
    });
    SUBCASE("in phase") {
        const auto i = sampled(4096, 1, kF, [](double t) {
            return 2.0 * std::sin(2.0 * M_PI * kF * t);
        });
        const PowerResult r = power_factor(v, i);
        CHECK(r.pf == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.p_in == doctest::Approx(170.0).epsilon(1e-9));
    }
    SUBCASE("60 degree displacement halves it") {
        const auto i = sampled(4096, 1, kF, [](double t) {
            return 2.0 * std::sin(2.0 * M_PI * kF * t - M_PI / 3.0);
        });
        CHECK(power_factor(v, i).pf == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("distortion-only current obeys pf = 1/sqrt(1+thd^2)") {
        const auto i = sampled(4096, 1, kF, [](double t) {
            return std::sin(2.0 * M_PI * kF * t) +
                   0.06 * std::sin(3.0 * 2.0 * M_PI * kF * t);
        });
        const PowerResult r = power_factor(v, i);
        CHECK(r.pf == doctest::Approx(1.0 / std::sqrt(1.0 + 0.06 * 0.06))
                          .epsilon(5e-3));
    }
    SUBCASE("zero RMS rejected") {
        const auto i = sampled(4096, 1, kF, [](double) { return 0.0; });
        CHECK_THROWS_AS(power_factor(v, i), std::invalid_argument);
    }
}

TEST_CASE("thd basics") {
    HarmonicSpectrum s;
    s.rms = {1.0};
    CHECK(thd(s) == 0.0);
    s.rms = {1.0, 0.0, 0.1};
    CHECK(thd(s) == doctest::Approx(0.1).epsilon(1e-12));
    s.rms = {0.0, 0.5};
    CHECK_THROWS_AS(thd(s), std::invalid_argument);
}

TEST_CASE("pf-thd identity on random zero-displacement currents") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> amp(0.0, 0.3);
    const auto v = sampled(4096, 1, kF, [](double t) {
        return std::sin(2.0 * M_PI * kF * t);
    });
    for (int trial = 0; trial < 20; ++trial) {
        double a3 = amp(rng), a5 = amp(rng), a7 = amp(rng);
        const auto i = sampled(4096, 1, kF, [&](double t) {
            const double w0 = 2.0 * M_PI * kF * t;
            return std::sin(w0) + a3 * std::sin(3 * w0) + a5 * std::sin(5 * w0) +
                   a7 * std::sin(7 * w0);
        });
        const double pf = power_factor(v, i).pf;
        const double d = thd(fourier_harmonics(i, 10));
        CHECK(pf == doctest::Approx(1.0 / std::sqrt(1.0 + d * d)).epsilon(5e-3));
    }
}

TEST_CASE("class D limit table") {
    SUBCASE("per-watt constants verbatim at 1 W") {
        const auto limits = iec_class_d_limits(1.0);
        REQUIRE(limits.size() == 19);
        const double expect[] = {3.4, 1.9, 1.0, 0.5, 0.35, 0.2962};
        for (int k = 0; k < 6; ++k) {
            CHECK(limits[k].first == 3 + 2 * k);
            CHECK(limits[k].second == doctest::Approx(expect[k] / 1000.0));
        }
        for (size_t k = 6; k < limits.size(); ++k) {
            CHECK(limits[k].second ==
                  doctest::Approx(3.85 / limits[k].first / 1000.0));
        }
    }
    SUBCASE("scaling with input power") {
        const auto at100 = iec_class_d_limits(100.0);
        CHECK(at100[0].second == doctest::Approx(0.340));           // h3
        CHECK(at100[6].second == doctest::Approx(25.67e-3).epsilon(1e-3));  // h15
        const auto at114 = iec_class_d_limits(114.68);
        CHECK(at114[0].second == doctest::Approx(0.38991).epsilon(1e-4));
    }
    SUBCASE("rejects non-positive power") {
        CHECK_THROWS_AS(iec_class_d_limits(0.0), std::invalid_argument);
    }
}

TEST_CASE("iec check verdicts") {
    HarmonicSpectrum s;
    s.rms.assign(40, 0.0);
    s.rms[0] = 1.0;

    SUBCASE("pure fundamental passes") {
        const IecReport r = iec_check(s, 100.0);
        CHECK(r.overall_pass);
        CHECK(r.in_scope);
        CHECK(r.rows.size() == 19);
    }
    SUBCASE("one harmonic at 1.01x its limit fails exactly one row") {
        s.rms[2] = 1.01 * 3.4 * 100.0 / 1000.0;  // h3
        const IecReport r = iec_check(s, 100.0);
        CHECK_FALSE(r.overall_pass);
        int failing = 0;
        for (const auto& row : r.rows)
            if (!row.pass) ++failing;
        CHECK(failing == 1);
        CHECK_FALSE(r.rows[0].pass);
    }
    SUBCASE("scaling all magnitudes down never turns pass into fail") {
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> amp(0.0, 0.5);
        for (int trial = 0; trial < 50; ++trial) {
            HarmonicSpectrum big;
            big.rms.assign(40, 0.0);
            big.rms[0] = 1.0;
            for (int h = 3; h <= 39; h += 2) big.rms[h - 1] = amp(rng);
            HarmonicSpectrum small = big;
            for (double& x : small.rms) x *= 0.5;
            const IecReport rb = iec_check(big, 100.0);
            const IecReport rs = iec_check(small, 100.0);
            for (size_t k = 0; k < rb.rows.size(); ++k) {
                if (rb.rows[k].pass) CHECK(rs.rows[k].pass);
            }
        }
    }
    SUBCASE("out-of-range power is flagged advisory") {
        CHECK_FALSE(iec_check(s, 50.0).in_scope);
        CHECK_FALSE(iec_check(s, 700.0).in_scope);
    }
    SUBCASE("short spectrum rejected") {
        s.rms.resize(20);
        CHECK_THROWS_AS(iec_check(s, 100.0), std::invalid_argument);
    }
}

TEST_CASE("report formatting") {
    HarmonicSpectrum s;
    s.rms.assign(40, 0.0);
    s.rms[0] = 1.0;
    const std::string text = format_iec_report(iec_check(s, 100.0));
    CHECK(text.find("overall: PASS") != std::string::npos);
    CHECK(text.find(" 39 ") != std::string::npos);
}

TEST_CASE("waveform CSV round trip") {
    const char* path = "roundtrip_test.csv";
    {
        std::FILE* f = std::fopen(path, "w");
        REQUIRE(f);
        std::fprintf(f, "time_s,value\n");
        for (int k = 0; k < 256; ++k) {
            const double t = k / (256.0 * kF);
            std::fprintf(f, "%.12e,%.12e\n", t, std::sin(2.0 * M_PI * kF * t));
        }
        std::fclose(f);
    }
    const WaveformSeries w = read_waveform_csv(path, kF);
    CHECK(w.samples.size() == 256);
    CHECK(w.uniform);
    const HarmonicSpectrum spec = fourier_harmonics(w, 5);
    CHECK(spec.rms[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    std::remove(path);

    CHECK_THROWS_AS(read_waveform_csv("does_not_exist.csv", kF),
                    std::runtime_error);
}

TEST_CASE("aggregate metrics on an ideal lossless converter") {
    CircuitParams c;
    c.l_leakage = 0.0;
    c.c_out_esr = 0.0;
    c.c_oss = 0.0;
    c.r_dson_primary = 0.0;
    c.r_dson_secondary = 0.0;
    c.v_f_body = 0.0;
    c.v_f_bridge = 0.0;
    const ControlParams ctl;
    const SimTrace trace = run_simulation(c, ctl, 4.2, 4, 30);
    const LineMetrics m = aggregate_metrics(trace, c.v_line_rms, 4.2);
    CHECK(m.efficiency == doctest::Approx(1.0).epsilon(0.02));
    CHECK(m.p_in == doctest::Approx(m.p_out).epsilon(0.02));
    CHECK(m.pf > 0.99);
}

TEST_CASE("aggregate metrics sanity on the reference board") {
    CircuitParams c;
    c.c_out_esr = 0.10;
    const ControlParams ctl;
    const SimTrace trace = run_simulation(c, ctl, 4.2, 4, 30);
    const LineMetrics m = aggregate_metrics(trace, c.v_line_rms, 4.2);
    CHECK(m.p_out <= m.p_in);
    CHECK(m.pf >= 0.0);
    CHECK(m.pf <= 1.0);
    CHECK(m.i_thd >= 0.0);
    CHECK(m.efficiency > 0.0);
    CHECK(m.efficiency < 1.0);
    CHECK(m.f_sw_min > 0.0);
    CHECK(m.f_sw_max >= m.f_sw_min);
    CHECK(m.f_sw_max <= ctl.f_sw_max * (1.0 + 1e-9));
    CHECK(m.settled);
}
