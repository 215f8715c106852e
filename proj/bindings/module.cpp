#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include "pfc/analysis.hpp"
#include "pfc/design.hpp"
#include "pfc/sim.hpp"
#include "pfc/smallsignal.hpp"

namespace py = pybind11;
using namespace pfc;

PYBIND11_MODULE(_pfckit, m) {
    m.doc() = "Design and cycle-level simulation of a CrCM PFC flyback converter";

    py::class_<DesignSpec>(m, "DesignSpec")
        .def(py::init<>())
        .def_readwrite("vac_min", &DesignSpec::vac_min)
        .def_readwrite("vac_max", &DesignSpec::vac_max)
        .def_readwrite("v_out", &DesignSpec::v_out)
        .def_readwrite("i_out", &DesignSpec::i_out)
        .def_readwrite("f_line_min", &DesignSpec::f_line_min)
        .def_readwrite("f_sw_min", &DesignSpec::f_sw_min)
        .def_readwrite("d_max", &DesignSpec::d_max)
        .def_readwrite("eta_target", &DesignSpec::eta_target)
        .def_readwrite("v_f_diode", &DesignSpec::v_f_diode)
        .def_readwrite("v_ripple", &DesignSpec::v_ripple)
        .def_readwrite("v_aux_max", &DesignSpec::v_aux_max)
        .def_readwrite("v_clamp", &DesignSpec::v_clamp)
        .def_readwrite("delta_v_clamp", &DesignSpec::delta_v_clamp)
        .def("validate", &DesignSpec::validate);

    py::class_<DesignOutput>(m, "DesignOutput")
        .def_readonly("l_primary", &DesignOutput::l_primary)
        .def_readonly("n_sp", &DesignOutput::n_sp)
        .def_readonly("n_ap", &DesignOutput::n_ap)
        .def_readonly("n_as", &DesignOutput::n_as)
        .def_readonly("c_out", &DesignOutput::c_out)
        .def_readonly("r_snubber", &DesignOutput::r_snubber)
        .def_readonly("c_snubber", &DesignOutput::c_snubber)
        .def_readonly("i_peak_primary", &DesignOutput::i_peak_primary)
        .def_readonly("p_in_max", &DesignOutput::p_in_max);

    m.def("primary_inductance", &primary_inductance, py::arg("spec"),
          py::arg("p_out_max"));
    m.def("turns_ratio_secondary", &turns_ratio_secondary);
    m.def("turns_ratio_aux_primary", &turns_ratio_aux_primary);
    m.def("turns_ratio_aux_secondary", &turns_ratio_aux_secondary);
    m.def("output_capacitance", &output_capacitance);
    m.def("peak_primary_current", &peak_primary_current, py::arg("spec"),
          py::arg("p_out_max"), py::arg("l_primary"));
    m.def("snubber_resistor", &snubber_resistor);
    m.def("snubber_capacitor", &snubber_capacitor);
    m.def("full_design", &full_design, py::arg("spec"), py::arg("p_out_max"),
          py::arg("l_leak") = 0.0);

    py::class_<CircuitParams>(m, "CircuitParams")
        .def(py::init<>())
        .def_readwrite("l_primary", &CircuitParams::l_primary)
        .def_readwrite("l_leakage", &CircuitParams::l_leakage)
        .def_readwrite("n_sp", &CircuitParams::n_sp)
        .def_readwrite("c_out", &CircuitParams::c_out)
        .def_readwrite("c_out_esr", &CircuitParams::c_out_esr)
        .def_readwrite("c_oss", &CircuitParams::c_oss)
        .def_readwrite("r_dson_primary", &CircuitParams::r_dson_primary)
        .def_readwrite("r_dson_secondary", &CircuitParams::r_dson_secondary)
        .def_readwrite("v_f_body", &CircuitParams::v_f_body)
        .def_readwrite("v_f_bridge", &CircuitParams::v_f_bridge)
        .def_readwrite("r_snubber", &CircuitParams::r_snubber)
        .def_readwrite("c_snubber", &CircuitParams::c_snubber)
        .def_readwrite("v_line_rms", &CircuitParams::v_line_rms)
        .def_readwrite("f_line", &CircuitParams::f_line)
        .def("validate", &CircuitParams::validate);

    py::enum_<QrDelayMode>(m, "QrDelayMode")
        .value("none", QrDelayMode::none)
        .value("half_ring", QrDelayMode::half_ring);

    py::class_<ControlParams>(m, "ControlParams")
        .def(py::init<>())
        .def_readwrite("t_on_min", &ControlParams::t_on_min)
        .def_readwrite("t_on_max", &ControlParams::t_on_max)
        .def_readwrite("f_sw_max", &ControlParams::f_sw_max)
        .def_readwrite("loop_bandwidth", &ControlParams::loop_bandwidth)
        .def_readwrite("v_ref", &ControlParams::v_ref)
        .def_readwrite("soft_start_time", &ControlParams::soft_start_time)
        .def_readwrite("qr_delay_mode", &ControlParams::qr_delay_mode)
        .def_readwrite("gain", &ControlParams::gain)
        .def("validate", &ControlParams::validate);

    py::class_<LossBreakdown>(m, "LossBreakdown")
        .def_readonly("conduction_primary", &LossBreakdown::conduction_primary)
        .def_readonly("conduction_secondary_channel",
                      &LossBreakdown::conduction_secondary_channel)
        .def_readonly("conduction_secondary_body_diode",
                      &LossBreakdown::conduction_secondary_body_diode)
        .def_readonly("switching_coss", &LossBreakdown::switching_coss)
        .def_readonly("snubber", &LossBreakdown::snubber)
        .def_readonly("bridge", &LossBreakdown::bridge)
        .def_readonly("cap_esr", &LossBreakdown::cap_esr)
        .def_readonly("total", &LossBreakdown::total);

    py::class_<CycleRecord>(m, "CycleRecord")
        .def_readonly("t_start", &CycleRecord::t_start)
        .def_readonly("v_in_inst", &CycleRecord::v_in_inst)
        .def_readonly("t_on", &CycleRecord::t_on)
        .def_readonly("t_off", &CycleRecord::t_off)
        .def_readonly("t_qr", &CycleRecord::t_qr)
        .def_readonly("period", &CycleRecord::period)
        .def_readonly("i_pk_primary", &CycleRecord::i_pk_primary)
        .def_readonly("i_pk_secondary", &CycleRecord::i_pk_secondary)
        .def_readonly("e_in", &CycleRecord::e_in)
        .def_readonly("e_out", &CycleRecord::e_out)
        .def_readonly("switched", &CycleRecord::switched)
        .def_readonly("losses", &CycleRecord::losses);

    py::class_<TimePoint>(m, "TimePoint")
        .def_readonly("t", &TimePoint::t)
        .def_readonly("value", &TimePoint::value);

    py::class_<SimTrace>(m, "SimTrace")
        .def_readonly("cycles", &SimTrace::cycles)
        .def_readonly("i_in_samples", &SimTrace::i_in_samples)
        .def_readonly("v_out_samples", &SimTrace::v_out_samples)
        .def_readonly("settled", &SimTrace::settled)
        .def_readonly("f_line", &SimTrace::f_line)
        .def_readonly("v_line_rms", &SimTrace::v_line_rms)
        .def_readonly("i_load", &SimTrace::i_load);

    m.def("run_simulation", &run_simulation, py::arg("circuit"),
          py::arg("control"), py::arg("i_load"), py::arg("n_line_cycles"),
          py::arg("settle_cycles"));
    m.def("derive_loop_gain", &derive_loop_gain);
    m.def("solve_clamp_voltage", &solve_clamp_voltage, py::arg("circuit"),
          py::arg("i_pk"), py::arg("f_sw"), py::arg("v_reflected"));
    m.def("write_waveform_csv", &write_waveform_csv);
    m.def("write_cycles_csv", &write_cycles_csv);

    py::class_<HarmonicSpectrum>(m, "HarmonicSpectrum")
        .def_readonly("f_fundamental", &HarmonicSpectrum::f_fundamental)
        .def_readonly("rms", &HarmonicSpectrum::rms)
        .def_readonly("dc", &HarmonicSpectrum::dc);

    py::class_<LineMetrics>(m, "LineMetrics")
        .def_readonly("p_in", &LineMetrics::p_in)
        .def_readonly("s_in", &LineMetrics::s_in)
        .def_readonly("pf", &LineMetrics::pf)
        .def_readonly("i_thd", &LineMetrics::i_thd)
        .def_readonly("p_out", &LineMetrics::p_out)
        .def_readonly("efficiency", &LineMetrics::efficiency)
        .def_readonly("v_ripple_pp", &LineMetrics::v_ripple_pp)
        .def_readonly("f_sw_min", &LineMetrics::f_sw_min)
        .def_readonly("f_sw_max", &LineMetrics::f_sw_max)
        .def_readonly("v_out_mean", &LineMetrics::v_out_mean)
        .def_readonly("settled", &LineMetrics::settled);

    py::class_<IecRow>(m, "IecRow")
        .def_readonly("harmonic", &IecRow::harmonic)
        .def_readonly("limit_mA_per_W", &IecRow::limit_mA_per_W)
        .def_readonly("limit_A", &IecRow::limit_A)
        .def_readonly("measured_A", &IecRow::measured_A)
        .def_readonly("pass_", &IecRow::pass);

    py::class_<IecReport>(m, "IecReport")
        .def_readonly("p_in", &IecReport::p_in)
        .def_readonly("rows", &IecReport::rows)
        .def_readonly("overall_pass", &IecReport::overall_pass)
        .def_readonly("in_scope", &IecReport::in_scope);

    m.def("aggregate_metrics", &aggregate_metrics, py::arg("trace"),
          py::arg("v_line_rms"), py::arg("i_load"));
    m.def("iec_class_d_limits", &iec_class_d_limits);
    m.def(
        "iec_check_trace",
        [](const SimTrace& trace, double p_in) {
            return iec_check(fourier_harmonics(line_current_waveform(trace), 40),
                             p_in);
        },
        py::arg("trace"), py::arg("p_in"));
    m.def("format_iec_report", &format_iec_report);
    m.def(
        "line_current_harmonics",
        [](const SimTrace& trace, int h_max) {
            return fourier_harmonics(line_current_waveform(trace), h_max);
        },
        py::arg("trace"), py::arg("h_max") = 40);

    py::class_<PlantModel>(m, "PlantModel")
        .def(py::init<>())
        .def_readwrite("dc_gain", &PlantModel::dc_gain)
        .def_readwrite("pole_hz", &PlantModel::pole_hz);

    py::class_<CompensatorModel>(m, "CompensatorModel")
        .def(py::init<>())
        .def_readwrite("integrator_gain", &CompensatorModel::integrator_gain)
        .def_readwrite("zero_hz", &CompensatorModel::zero_hz)
        .def_readwrite("pole_hz", &CompensatorModel::pole_hz);

    py::class_<StabilityResult>(m, "StabilityResult")
        .def_readonly("crossover_hz", &StabilityResult::crossover_hz)
        .def_readonly("phase_margin_deg", &StabilityResult::phase_margin_deg)
        .def_readonly("gain_margin_db", &StabilityResult::gain_margin_db)
        .def_readonly("stable", &StabilityResult::stable);

    m.def("plant_from_operating_point", &plant_from_operating_point,
          py::arg("c_out"), py::arg("v_out"), py::arg("i_load"),
          py::arg("modulator_gain") = 1.0);
    m.def("loop_gain_at", &loop_gain_at);
    m.def("phase_margin", &phase_margin, py::arg("plant"), py::arg("comp"),
          py::arg("f_min") = 1.0, py::arg("f_max") = 10e3);
}
