#include "pfc/json_io.hpp"

namespace pfc {

using nlohmann::json;

namespace {

template <typename T>
void opt(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

}  // namespace

void to_json(json& j, const DesignSpec& s) {
    j = json{{"vac_min", s.vac_min},
             {"vac_max", s.vac_max},
             {"v_out", s.v_out},
             {"i_out", s.i_out},
             {"f_line_min", s.f_line_min},
             {"f_sw_min", s.f_sw_min},
             {"d_max", s.d_max},
             {"eta_target", s.eta_target},
             {"v_f_diode", s.v_f_diode},
             {"v_ripple", s.v_ripple},
             {"v_aux_max", s.v_aux_max},
             {"v_clamp", s.v_clamp},
             {"delta_v_clamp", s.delta_v_clamp}};
}

void from_json(const json& j, DesignSpec& s) {
    j.at("vac_min").get_to(s.vac_min);
    j.at("vac_max").get_to(s.vac_max);
    j.at("v_out").get_to(s.v_out);
    j.at("i_out").get_to(s.i_out);
    j.at("f_line_min").get_to(s.f_line_min);
    j.at("f_sw_min").get_to(s.f_sw_min);
    j.at("d_max").get_to(s.d_max);
    j.at("eta_target").get_to(s.eta_target);
    j.at("v_ripple").get_to(s.v_ripple);
    opt(j, "v_f_diode", s.v_f_diode);
    opt(j, "v_aux_max", s.v_aux_max);
    opt(j, "v_clamp", s.v_clamp);
    opt(j, "delta_v_clamp", s.delta_v_clamp);
}

void to_json(json& j, const DesignOutput& o) {
    j = json{{"l_primary", o.l_primary},
             {"n_sp", o.n_sp},
             {"n_ap", o.n_ap},
             {"n_as", o.n_as},
             {"c_out", o.c_out},
             {"r_snubber", o.r_snubber},
             {"c_snubber", o.c_snubber},
             {"i_peak_primary", o.i_peak_primary},
             {"p_in_max", o.p_in_max}};
}

void from_json(const json& j, DesignOutput& o) {
    j.at("l_primary").get_to(o.l_primary);
    j.at("n_sp").get_to(o.n_sp);
    j.at("n_ap").get_to(o.n_ap);
    j.at("n_as").get_to(o.n_as);
    j.at("c_out").get_to(o.c_out);
    j.at("r_snubber").get_to(o.r_snubber);
    j.at("c_snubber").get_to(o.c_snubber);
    j.at("i_peak_primary").get_to(o.i_peak_primary);
    j.at("p_in_max").get_to(o.p_in_max);
}

void to_json(json& j, const CircuitParams& c) {
    j = json{{"l_primary", c.l_primary},
             {"l_leakage", c.l_leakage},
             {"n_sp", c.n_sp},
             {"c_out", c.c_out},
             {"c_out_esr", c.c_out_esr},
             {"c_oss", c.c_oss},
             {"r_dson_primary", c.r_dson_primary},
             {"r_dson_secondary", c.r_dson_secondary},
             {"v_f_body", c.v_f_body},
             {"v_f_bridge", c.v_f_bridge},
             {"r_snubber", c.r_snubber},
             {"c_snubber", c.c_snubber},
             {"v_line_rms", c.v_line_rms},
             {"f_line", c.f_line}};
}

void from_json(const json& j, CircuitParams& c) {
    opt(j, "l_primary", c.l_primary);
    opt(j, "l_leakage", c.l_leakage);
    opt(j, "n_sp", c.n_sp);
    opt(j, "c_out", c.c_out);
    opt(j, "c_out_esr", c.c_out_esr);
    opt(j, "c_oss", c.c_oss);
    opt(j, "r_dson_primary", c.r_dson_primary);
    opt(j, "r_dson_secondary", c.r_dson_secondary);
    opt(j, "v_f_body", c.v_f_body);
    opt(j, "v_f_bridge", c.v_f_bridge);
    opt(j, "r_snubber", c.r_snubber);
    opt(j, "c_snubber", c.c_snubber);
    opt(j, "v_line_rms", c.v_line_rms);
    opt(j, "f_line", c.f_line);
}

void to_json(json& j, const ControlParams& c) {
    j = json{{"t_on_min", c.t_on_min},
             {"t_on_max", c.t_on_max},
             {"f_sw_max", c.f_sw_max},
             {"loop_bandwidth", c.loop_bandwidth},
             {"v_ref", c.v_ref},
             {"soft_start_time", c.soft_start_time},
             {"qr_delay_mode",
              c.qr_delay_mode == QrDelayMode::half_ring ? "half_ring" : "none"},
             {"gain", c.gain}};
}

void from_json(const json& j, ControlParams& c) {
    opt(j, "t_on_min", c.t_on_min);
    opt(j, "t_on_max", c.t_on_max);
    opt(j, "f_sw_max", c.f_sw_max);
    opt(j, "loop_bandwidth", c.loop_bandwidth);
    opt(j, "v_ref", c.v_ref);
    opt(j, "soft_start_time", c.soft_start_time);
    opt(j, "gain", c.gain);
    if (j.contains("qr_delay_mode")) {
        const std::string mode = j.at("qr_delay_mode").get<std::string>();
        if (mode == "half_ring") {
            c.qr_delay_mode = QrDelayMode::half_ring;
        } else if (mode == "none") {
            c.qr_delay_mode = QrDelayMode::none;
        } else {
            throw std::invalid_argument("qr_delay_mode must be none or half_ring");
        }
    }
}

void to_json(json& j, const LineMetrics& m) {
    j = json{{"p_in", m.p_in},
             {"s_in", m.s_in},
             {"pf", m.pf},
             {"i_thd", m.i_thd},
             {"p_out", m.p_out},
             {"efficiency", m.efficiency},
             {"v_ripple_pp", m.v_ripple_pp},
             {"f_sw_min", m.f_sw_min},
             {"f_sw_max", m.f_sw_max},
             {"v_out_mean", m.v_out_mean},
             {"settled", m.settled}};
}

void from_json(const json& j, LineMetrics& m) {
    j.at("p_in").get_to(m.p_in);
    j.at("s_in").get_to(m.s_in);
    j.at("pf").get_to(m.pf);
    j.at("i_thd").get_to(m.i_thd);
    j.at("p_out").get_to(m.p_out);
    j.at("efficiency").get_to(m.efficiency);
    j.at("v_ripple_pp").get_to(m.v_ripple_pp);
    j.at("f_sw_min").get_to(m.f_sw_min);
    j.at("f_sw_max").get_to(m.f_sw_max);
    j.at("v_out_mean").get_to(m.v_out_mean);
    opt(j, "settled", m.settled);
}

void to_json(json& j, const IecReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back(json{{"harmonic", row.harmonic},
                            {"limit_mA_per_W", row.limit_mA_per_W},
                            {"limit_A", row.limit_A},
                            {"measured_A", row.measured_A},
                            {"pass", row.pass}});
    }
    j = json{{"p_in", r.p_in},
             {"rows", rows},
             {"overall_pass", r.overall_pass},
             {"in_scope", r.in_scope}};
}

void to_json(json& j, const StabilityResult& r) {
    j = json{{"crossover_hz", r.crossover_hz},
             {"phase_margin_deg", r.phase_margin_deg},
             {"gain_margin_db", r.gain_margin_db},
             {"stable", r.stable}};
}

}  // namespace pfc
