#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pfc/analysis.hpp"
#include "pfc/design.hpp"
#include "pfc/json_io.hpp"
#include "pfc/sim.hpp"
#include "pfc/smallsignal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomainFailure = 1;  // non-compliance, no settle, no crossover
constexpr int kExitUsageError = 2;     // config / validation problems

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = ".";
    int jobs = 1;
    std::string format = "both";
};

json load_config(const GlobalOpts& g) {
    if (g.config_path.empty()) return json::object();
    std::ifstream in(g.config_path);
    if (!in) throw std::runtime_error("cannot open config " + g.config_path);
    json j;
    in >> j;
    return j;
}

// write-temp-then-rename so partially written files are never observed
void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

void write_json_atomic(const fs::path& path, const json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

pfc::CircuitParams circuit_from_config(const json& cfg) {
    pfc::CircuitParams c;
    if (cfg.contains("circuit")) cfg.at("circuit").get_to(c);
    return c;
}

pfc::ControlParams control_from_config(const json& cfg) {
    pfc::ControlParams c;
    if (cfg.contains("control")) cfg.at("control").get_to(c);
    return c;
}

std::string metric_row_csv(const pfc::LineMetrics& m, double i_load,
                           const std::string& error) {
    char buf[256];
    if (error.empty()) {
        std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%.4f,%.4f,%.4f,%.2f,%.2f,",
                      m.p_in, m.v_out_mean, i_load, m.p_out, m.pf,
                      m.i_thd * 100.0, m.efficiency * 100.0);
        return std::string(buf);
    }
    std::snprintf(buf, sizeof(buf), ",,%.4f,,,,,", i_load);
    return std::string(buf) + error;
}

struct SimPoint {
    pfc::SimTrace trace;
    pfc::LineMetrics metrics;
};

SimPoint run_point(const json& cfg, double v_line, double i_load,
                   int n_cycles, int settle_cycles) {
    pfc::CircuitParams circuit = circuit_from_config(cfg);
    circuit.v_line_rms = v_line;
    pfc::ControlParams control = control_from_config(cfg);
    SimPoint p;
    p.trace = pfc::run_simulation(circuit, control, i_load, n_cycles, settle_cycles);
    p.metrics = pfc::aggregate_metrics(p.trace, v_line, i_load);
    return p;
}

int cmd_design(const GlobalOpts& g) {
    const json cfg = load_config(g);
    pfc::DesignSpec spec;
    if (cfg.contains("design")) cfg.at("design").get_to(spec);
    const double p_out_max = cfg.value("p_out_max", spec.v_out * spec.i_out);
    const double l_leak = cfg.value("l_leakage", 0.0);

    const pfc::DesignOutput out = pfc::full_design(spec, p_out_max, l_leak);

    write_json_atomic(fs::path(g.out_dir) / "design.json", json(out));

    char buf[96];
    std::string table;
    auto row = [&](const char* name, double value, const char* unit) {
        std::snprintf(buf, sizeof(buf), "  %-28s %12.6g %s\n", name, value, unit);
        table += buf;
    };
    table += "Design summary\n";
    row("input voltage min", spec.vac_min, "Vrms");
    row("input voltage max", spec.vac_max, "Vrms");
    row("output", spec.v_out, "V");
    row("output current", spec.i_out, "A");
    row("max output power", p_out_max, "W");
    row("min switching frequency", spec.f_sw_min, "Hz");
    row("max duty", spec.d_max, "");
    row("primary inductance", out.l_primary * 1e6, "uH");
    row("turns ratio Ns/Np", out.n_sp, "");
    row("turns ratio Na/Np", out.n_ap, "");
    row("turns ratio Na/Ns", out.n_as, "");
    row("peak primary current", out.i_peak_primary, "A");
    row("output capacitance", out.c_out * 1e6, "uF");
    row("snubber resistor", out.r_snubber / 1e3, "kOhm");
    row("snubber capacitor", out.c_snubber * 1e9, "nF");
    std::cout << table;
    return kExitOk;
}

int cmd_simulate(const GlobalOpts& g, double v_line, double i_load,
                 int n_cycles, int settle_cycles) {
    const json cfg = load_config(g);
    const SimPoint p = run_point(cfg, v_line, i_load, n_cycles, settle_cycles);

    const fs::path out_dir(g.out_dir);
    fs::create_directories(out_dir);
    if (g.format != "json") {
        pfc::write_waveform_csv(p.trace, [&] {
            pfc::CircuitParams c = circuit_from_config(cfg);
            c.v_line_rms = v_line;
            return c;
        }(), (out_dir / "waveform.csv").string());
        pfc::write_cycles_csv(p.trace, (out_dir / "cycles.csv").string());
    }
    if (g.format != "csv")
        write_json_atomic(out_dir / "metrics.json", json(p.metrics));

    std::printf("Pin=%.2f W  Vout=%.3f V  PF=%.4f  THD=%.2f%%  eff=%.2f%%  %s\n",
                p.metrics.p_in, p.metrics.v_out_mean, p.metrics.pf,
                p.metrics.i_thd * 100.0, p.metrics.efficiency * 100.0,
                p.trace.settled ? "settled" : "NOT SETTLED");
    return p.trace.settled ? kExitOk : kExitDomainFailure;
}

int cmd_sweep(const GlobalOpts& g, int n_cycles, int settle_cycles) {
    const json cfg = load_config(g);
    if (!cfg.contains("sweep") || !cfg.at("sweep").is_array() ||
        cfg.at("sweep").empty()) {
        std::cerr << "error: config needs a non-empty sweep list\n";
        return kExitUsageError;
    }

    struct Point {
        double v_line = 0.0;
        double i_load = 0.0;
        pfc::LineMetrics metrics;
        std::string error;
    };
    std::vector<Point> points;
    for (const auto& entry : cfg.at("sweep")) {
        Point p;
        p.v_line = entry.at("v_line_rms").get<double>();
        p.i_load = entry.at("i_load").get<double>();
        points.push_back(p);
    }

    // Points are independent; run up to --jobs of them concurrently. Results
    // land in the pre-sized vector, so output order follows input order.
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t k = next.fetch_add(1); k < points.size();
             k = next.fetch_add(1)) {
            try {
                points[k].metrics =
                    run_point(cfg, points[k].v_line, points[k].i_load, n_cycles,
                              settle_cycles).metrics;
            } catch (const std::exception& e) {
                points[k].error = e.what();
            }
        }
    };
    const int n_jobs = std::max(1, std::min<int>(g.jobs, points.size()));
    std::vector<std::thread> threads;
    for (int k = 1; k < n_jobs; ++k) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();

    std::string csv = "p_in_W,v_out_V,i_out_A,p_out_W,pf,i_thd_pct,eff_pct,error\n";
    json rows = json::array();
    for (const auto& p : points) {
        csv += metric_row_csv(p.metrics, p.i_load, p.error) + "\n";
        json row = p.error.empty() ? json(p.metrics) : json::object();
        row["v_line_rms"] = p.v_line;
        row["i_load"] = p.i_load;
        if (!p.error.empty()) row["error"] = p.error;
        rows.push_back(row);
    }
    const fs::path out_dir(g.out_dir);
    if (g.format != "json")
        write_file_atomic(out_dir / "sweep.csv", csv);
    if (g.format != "csv")
        write_json_atomic(out_dir / "sweep.json", rows);
    std::cout << csv;
    return kExitOk;
}

int cmd_iec_check(const GlobalOpts& g, const std::string& waveform_path,
                  double p_in_override, double f_line, double v_line,
                  double i_load, int n_cycles, int settle_cycles) {
    const json cfg = load_config(g);
    pfc::HarmonicSpectrum spec;
    double p_in = 0.0;

    if (!waveform_path.empty()) {
        const pfc::WaveformSeries w = pfc::read_waveform_csv(waveform_path, f_line);
        spec = pfc::fourier_harmonics(w, 40);
        if (p_in_override <= 0.0)
            throw std::runtime_error("--p-in is required with --waveform");
        p_in = p_in_override;
    } else {
        const SimPoint p = run_point(cfg, v_line, i_load, n_cycles, settle_cycles);
        spec = pfc::fourier_harmonics(pfc::line_current_waveform(p.trace), 40);
        p_in = p.metrics.p_in;
    }

    const pfc::IecReport report = pfc::iec_check(spec, p_in);
    std::cout << pfc::format_iec_report(report);
    write_json_atomic(fs::path(g.out_dir) / "iec_report.json", json(report));
    return report.overall_pass ? kExitOk : kExitDomainFailure;
}

int cmd_stability(const GlobalOpts& g, double i_load) {
    const json cfg = load_config(g);
    const pfc::CircuitParams circuit = circuit_from_config(cfg);
    const pfc::ControlParams control = control_from_config(cfg);

    const double modulator_gain = cfg.value("modulator_gain", 1.0);
    const pfc::PlantModel plant = pfc::plant_from_operating_point(
        circuit.c_out, control.v_ref, i_load, modulator_gain);

    pfc::CompensatorModel comp;
    comp.integrator_gain = 0.0;  // 0 = derive below unless the config sets it
    if (cfg.contains("compensator")) {
        const json& jc = cfg.at("compensator");
        comp.integrator_gain = jc.value("integrator_gain", 0.0);
        comp.zero_hz = jc.value("zero_hz", 0.0);
        comp.pole_hz = jc.value("pole_hz", 0.0);
    }
    if (comp.integrator_gain <= 0.0) {
        // Default: place the crossover at the configured loop bandwidth.
        const double f_bw = control.loop_bandwidth;
        comp.integrator_gain =
            2.0 * M_PI * f_bw /
            std::abs(plant.dc_gain /
                     std::complex<double>(1.0, f_bw / plant.pole_hz));
    }

    const double f_min = 1.0, f_max = 10e3;
    std::string bode = "f_hz,gain_db,phase_deg\n";
    char buf[96];
    const int n = 400;
    for (int k = 0; k <= n; ++k) {
        const double f = f_min * std::pow(f_max / f_min, k / double(n));
        const std::complex<double> t = pfc::loop_gain_at(plant, comp, f);
        std::snprintf(buf, sizeof(buf), "%.6g,%.6f,%.4f\n", f,
                      20.0 * std::log10(std::abs(t)),
                      std::arg(t) * 180.0 / M_PI);
        bode += buf;
    }
    const fs::path out_dir(g.out_dir);
    if (g.format != "json") write_file_atomic(out_dir / "bode.csv", bode);

    pfc::StabilityResult result;
    try {
        result = pfc::phase_margin(plant, comp, f_min, f_max);
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomainFailure;
    }
    if (g.format != "csv")
        write_json_atomic(out_dir / "stability.json", json(result));
    std::printf("crossover=%.3f Hz  phase margin=%.2f deg  %s\n",
                result.crossover_hz, result.phase_margin_deg,
                result.stable ? "stable" : "UNSTABLE");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Design, simulation and compliance tools for a CrCM PFC "
                 "flyback AC-DC converter"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "JSON run configuration");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--jobs", g.jobs, "max concurrent sweep points");
    app.add_option("--format", g.format, "csv|json|both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    double v_line = 120.0, i_load = 4.2;
    int n_cycles = 4, settle_cycles = 30;
    double p_in_override = 0.0, f_line = 60.0;
    std::string waveform_path;

    CLI::App* design = app.add_subcommand("design", "run the design equations");
    CLI::App* simulate =
        app.add_subcommand("simulate", "simulate one operating point");
    simulate->add_option("--v-line", v_line, "line voltage, Vrms");
    simulate->add_option("--i-load", i_load, "load current, A");
    simulate->add_option("--cycles", n_cycles, "recorded line cycles");
    simulate->add_option("--settle", settle_cycles, "discarded line cycles");
    CLI::App* sweep = app.add_subcommand("sweep", "simulate every config sweep point");
    sweep->add_option("--cycles", n_cycles, "recorded line cycles");
    sweep->add_option("--settle", settle_cycles, "discarded line cycles");
    CLI::App* iec = app.add_subcommand("iec-check", "harmonic-limit compliance");
    iec->add_option("--waveform", waveform_path, "current waveform CSV to analyze");
    iec->add_option("--p-in", p_in_override, "input power for limit scaling, W");
    iec->add_option("--f-line", f_line, "fundamental of the waveform CSV, Hz");
    iec->add_option("--v-line", v_line, "line voltage when simulating, Vrms");
    iec->add_option("--i-load", i_load, "load current when simulating, A");
    CLI::App* stability = app.add_subcommand("stability", "loop gain and phase margin");
    stability->add_option("--i-load", i_load, "operating-point load current, A");

    CLI11_PARSE(app, argc, argv);

    try {
        if (design->parsed()) return cmd_design(g);
        if (simulate->parsed())
            return cmd_simulate(g, v_line, i_load, n_cycles, settle_cycles);
        if (sweep->parsed()) return cmd_sweep(g, n_cycles, settle_cycles);
        if (iec->parsed())
            return cmd_iec_check(g, waveform_path, p_in_override, f_line, v_line,
                                 i_load, n_cycles, settle_cycles);
        if (stability->parsed()) return cmd_stability(g, i_load);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsageError;
    }
    return kExitUsageError;
}
