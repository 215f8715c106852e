#include "pfc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace pfc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kPi = 3.141592653589793;

// Floor on (v_out + drop) during deep start-up with ideal (zero-drop)
// components; keeps t_off and the transferred charge finite while the output
// is still a near-short. Irrelevant once v_out leaves the first volt.
constexpr double kMinSecondaryVolts = 0.5;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::domain_error(what);
}

double soft_ref(const ControlParams& control, double t) {
    if (control.soft_start_time <= 0.0) return control.v_ref;
    return control.v_ref * std::min(t / control.soft_start_time, 1.0);
}

// Charge through the secondary triangle i(t) = Ip (1 - t/T) over [a, b].
double tri_charge(double i_pk, double t_total, double a, double b) {
    if (t_total <= 0.0 || b <= a) return 0.0;
    return i_pk * ((b - a) - (b * b - a * a) / (2.0 * t_total));
}

// Integral of i(t)^2 over [a, b] for the same triangle.
double tri_charge_sq(double i_pk, double t_total, double a, double b) {
    if (t_total <= 0.0 || b <= a) return 0.0;
    auto f = [&](double x) {
        return i_pk * i_pk * (x - x * x / t_total + x * x * x / (3.0 * t_total * t_total));
    };
    return f(b) - f(a);
}

}  // namespace

void CircuitParams::validate() const {
    require(l_primary > 0.0, "l_primary must be positive");
    require(l_leakage >= 0.0, "l_leakage must be non-negative");
    require(l_leakage < l_primary, "l_leakage must be less than l_primary");
    require(n_sp > 0.0, "n_sp must be positive");
    require(c_out > 0.0, "c_out must be positive");
    require(c_out_esr >= 0.0, "c_out_esr must be non-negative");
    require(c_oss >= 0.0, "c_oss must be non-negative");
    require(r_dson_primary >= 0.0, "r_dson_primary must be non-negative");
    require(r_dson_secondary >= 0.0, "r_dson_secondary must be non-negative");
    require(v_f_body >= 0.0, "v_f_body must be non-negative");
    require(v_f_bridge >= 0.0, "v_f_bridge must be non-negative");
    require(r_snubber > 0.0, "r_snubber must be positive");
    require(c_snubber > 0.0, "c_snubber must be positive");
    require(v_line_rms > 0.0, "v_line_rms must be positive");
    require(f_line > 0.0, "f_line must be positive");
}

void ControlParams::validate() const {
    require(t_on_min > 0.0, "t_on_min must be positive");
    require(t_on_max >= t_on_min, "t_on_max must be >= t_on_min");
    require(f_sw_max > 0.0, "f_sw_max must be positive");
    require(loop_bandwidth > 0.0, "loop_bandwidth must be positive");
    require(v_ref > 0.0, "v_ref must be positive");
    require(soft_start_time >= 0.0, "soft_start_time must be non-negative");
    require(gain >= 0.0, "gain must be non-negative");
}

SyncRectState sync_rect_transition(SyncRectState sr, double v_ds) {
    sr.v_ds = v_ds;
    switch (sr.phase) {
        case SrPhase::off:
            if (v_ds < kSrConductionThreshold) sr.phase = SrPhase::body_diode;
            break;
        case SrPhase::body_diode:
            if (v_ds >= 0.0) {
                sr.phase = SrPhase::off;
            } else if (v_ds < kSrGateOnThreshold) {
                sr.phase = SrPhase::gate_on;
            }
            break;
        case SrPhase::gate_on:
            // Turn off inside [-8 mV, -4 mV), or immediately if current reversed.
            if (v_ds >= kSrGateOffLow) sr.phase = SrPhase::off;
            break;
    }
    return sr;
}

LossBreakdown cycle_losses(const CircuitParams& circuit, double i_pk_primary,
                           double t_on, double t_off, double period,
                           const SrTrajectory& sr, double v_in_inst,
                           double v_reflected, double v_clamp, double i_load) {
    LossBreakdown loss;
    const double i_pk_sec = i_pk_primary / circuit.n_sp;
    const double q_on = 0.5 * i_pk_primary * t_on;

    loss.bridge = 2.0 * circuit.v_f_bridge * q_on;
    loss.conduction_primary =
        (i_pk_primary * i_pk_primary / 3.0) * circuit.r_dson_primary * t_on;

    // Hard Coss dissipation only when the drain ring cannot reach zero
    // (valley switching achieves ZVS for v_in below the reflected voltage).
    if (v_in_inst > v_reflected && i_pk_primary > 0.0) {
        const double v_sw = v_in_inst + v_reflected;
        loss.switching_coss = 0.5 * circuit.c_oss * v_sw * v_sw;
    }

    // Leakage energy into the clamp; the diode keeps feeding the network until
    // the winding voltage falls back to the reflected level, so the cap absorbs
    // Vsn/(Vsn - Vr) times the raw leakage energy.
    if (i_pk_primary > 0.0 && circuit.l_leakage > 0.0) {
        double fac = 100.0;
        if (v_clamp > 1.01 * v_reflected) {
            fac = std::min(v_clamp / std::max(v_clamp - v_reflected, 1e-6), 100.0);
        }
        loss.snubber = 0.5 * circuit.l_leakage * i_pk_primary * i_pk_primary * fac;
    }

    // Secondary conduction split between body diode and channel.
    const double t_total = t_off;
    double t1 = t_total;
    double t2 = t_total;
    if (sr.active) {
        t1 = std::clamp(sr.t_gate_on, 0.0, t_total);
        t2 = std::clamp(sr.t_gate_off, t1, t_total);
    }
    loss.conduction_secondary_body_diode =
        circuit.v_f_body * (tri_charge(i_pk_sec, t_total, 0.0, t1) +
                            tri_charge(i_pk_sec, t_total, t2, t_total));
    loss.conduction_secondary_channel =
        circuit.r_dson_secondary * tri_charge_sq(i_pk_sec, t_total, t1, t2);

    // Output capacitor ESR sees (i_sec - i_load) during the conduction window.
    if (circuit.c_out_esr > 0.0 && t_total > 0.0) {
        const double q_sec = 0.5 * i_pk_sec * t_total;
        const double q2 = i_pk_sec * i_pk_sec * t_total / 3.0;
        loss.cap_esr = std::max(
            circuit.c_out_esr *
                (q2 - 2.0 * i_load * q_sec + i_load * i_load * t_total),
            0.0);
    }

    loss.total = loss.bridge + loss.conduction_primary + loss.switching_coss +
                 loss.snubber + loss.conduction_secondary_body_diode +
                 loss.conduction_secondary_channel + loss.cap_esr;
    return loss;
}

double solve_clamp_voltage(const CircuitParams& circuit, double i_pk, double f_sw,
                           double v_reflected) {
    circuit.validate();
    require(i_pk >= 0.0, "i_pk must be non-negative");
    require(f_sw > 0.0, "f_sw must be positive");
    require(v_reflected > 0.0, "v_reflected must be positive");
    // Balance: Vsn^2 / Rsn = 0.5 Llk Ipk^2 f * Vsn / (Vsn - Vr)
    // => Vsn^2 - Vr Vsn - P0 Rsn = 0 with P0 the raw leakage power.
    const double p0 = 0.5 * circuit.l_leakage * i_pk * i_pk * f_sw;
    const double disc = v_reflected * v_reflected + 4.0 * p0 * circuit.r_snubber;
    return 0.5 * (v_reflected + std::sqrt(disc));
}

CycleRecord advance_cycle(ConverterState& state, const CircuitParams& circuit,
                          const ControlParams& control, double i_load) {
    require(i_load >= 0.0, "i_load must be non-negative");

    CycleRecord rec;
    rec.t_start = state.sim_time;

    const double v_ref_eff = soft_ref(control, state.sim_time);
    const double v_pk = kSqrt2 * circuit.v_line_rms;
    const double v_line = v_pk * std::fabs(std::sin(state.line_phase));
    const double v_in = std::max(v_line - 2.0 * circuit.v_f_bridge, 0.0);
    rec.v_in_inst = v_in;

    const double v_r = control.v_ref / circuit.n_sp;  // nominal reflected voltage
    const double t_qr0 = control.qr_delay_mode == QrDelayMode::half_ring
                             ? kPi * std::sqrt(circuit.l_primary * circuit.c_oss)
                             : 0.0;

    // Burst skip: commanded ON time pinned at the floor while the output sits
    // above the reference -> withhold the pulse entirely.
    const bool skip = state.t_on <= control.t_on_min * (1.0 + 1e-12) &&
                      state.v_out > v_ref_eff;

    double q_sec = 0.0;
    if (skip || v_in <= 0.0) {
        // No energy transfer; run at the restart clamp rate.
        rec.t_on = 0.0;
        rec.t_off = 0.0;
        rec.period = 1.0 / control.f_sw_max;
        rec.t_qr = rec.period;
        rec.switched = false;
        // Clamp capacitor bleeds through its resistor.
        state.v_clamp = std::max(
            1.02 * v_r,
            state.v_clamp *
                std::exp(-rec.period / (circuit.r_snubber * circuit.c_snubber)));
    } else {
        const double t_on = state.t_on;
        const double i_pk = v_in * t_on / circuit.l_primary;
        const double i_pk_sec = i_pk / circuit.n_sp;
        const double e_mag = 0.5 * circuit.l_primary * i_pk * i_pk;
        const bool sr_active =
            state.v_out > kSrUvlo && circuit.r_dson_secondary > 0.0;
        const double i_off_thr =
            sr_active ? -kSrGateOffLow * 0.75 / circuit.r_dson_secondary : 0.0;

        // Fixed point on the effective secondary drop: t_off and the loss split
        // depend on the drop, and the drop is the loss energy per unit charge.
        double v_drop = sr_active ? 0.5 * i_pk_sec * circuit.r_dson_secondary
                                  : circuit.v_f_body;
        double t_off = 0.0;
        SrTrajectory sr;
        LossBreakdown loss;
        for (int it = 0; it < 40; ++it) {
            t_off = i_pk * circuit.l_primary * circuit.n_sp /
                    std::max(state.v_out + v_drop, kMinSecondaryVolts);
            sr.active = false;
            sr.t_gate_on = t_off;
            sr.t_gate_off = t_off;
            if (sr_active) {
                const double t1 = std::min(kSrDetectDelay, t_off);
                double t2 = t1;
                if (i_pk_sec > i_off_thr) {
                    t2 = std::max(t_off * (1.0 - i_off_thr / i_pk_sec), t1);
                }
                if (t2 - t1 >= kSrMinGateOn) {
                    sr.active = true;
                    sr.t_gate_on = t1;
                    sr.t_gate_off = t2;
                }
            }
            loss = cycle_losses(circuit, i_pk, t_on, t_off, 0.0, sr, v_in, v_r,
                                state.v_clamp, i_load);
            const double e_sec = loss.conduction_secondary_body_diode +
                                 loss.conduction_secondary_channel + loss.cap_esr;
            const double q = 0.5 * i_pk_sec * t_off;
            const double v_new = q > 0.0 ? e_sec / q : 0.0;
            const bool done =
                std::fabs(v_new - v_drop) < 1e-15 * std::max(v_drop, 1e-9);
            v_drop = v_new;
            if (done) break;
        }
        t_off = i_pk * circuit.l_primary * circuit.n_sp /
                std::max(state.v_out + v_drop, kMinSecondaryVolts);
        q_sec = e_mag / std::max(state.v_out + v_drop, kMinSecondaryVolts);

        rec.t_on = t_on;
        rec.t_off = t_off;
        rec.period = std::max(t_on + t_off + t_qr0, 1.0 / control.f_sw_max);
        rec.t_qr = rec.period - t_on - t_off;
        rec.i_pk_primary = i_pk;
        rec.i_pk_secondary = i_pk_sec;
        rec.switched = true;
        rec.losses = loss;

        // Energy bookkeeping. Secondary-side dissipation is carried inside e_mag
        // (the drop lengthens t_off); everything else is drawn on top of it.
        rec.e_in = e_mag + loss.snubber + loss.bridge + loss.conduction_primary +
                   loss.switching_coss;
        rec.e_out = e_mag - loss.conduction_secondary_body_diode -
                    loss.conduction_secondary_channel - loss.cap_esr;

        // Clamp capacitor: absorbs the leakage energy, bleeds into the resistor.
        const double e_cap = 0.5 * circuit.c_snubber * state.v_clamp * state.v_clamp +
                             loss.snubber -
                             state.v_clamp * state.v_clamp / circuit.r_snubber *
                                 rec.period;
        state.v_clamp = std::max(
            1.02 * v_r, std::sqrt(std::max(2.0 * e_cap / circuit.c_snubber, 0.0)));

        // Walk the rectifier state machine through the off interval.
        state.sync_rect = sync_rect_transition(state.sync_rect, -circuit.v_f_body);
        if (sr.active) {
            state.sync_rect = sync_rect_transition(state.sync_rect, -circuit.v_f_body);
            state.sync_rect = sync_rect_transition(
                state.sync_rect, 0.5 * (kSrGateOffLow + kSrGateOffHigh));
        }
        state.sync_rect = sync_rect_transition(state.sync_rect, 0.0);
    }

    state.v_out = std::max(
        state.v_out + (q_sec - i_load * rec.period) / circuit.c_out, 0.0);
    state.line_phase += 2.0 * kPi * circuit.f_line * rec.period;
    if (state.line_phase >= 2.0 * kPi) state.line_phase -= 2.0 * kPi;
    state.sim_time += rec.period;
    return rec;
}

double controller_update(ConverterState& state, const ControlParams& control,
                         double dt) {
    require(dt >= 0.0, "dt must be non-negative");
    require(control.gain > 0.0, "gain must be resolved before controller_update");
    const double v_ref_eff = soft_ref(control, state.sim_time);
    state.integrator += (v_ref_eff - state.v_out) * dt;
    const double cmd = control.gain * state.integrator;
    state.t_on = std::clamp(cmd, control.t_on_min, control.t_on_max);
    return state.t_on;
}

double derive_loop_gain(const CircuitParams& circuit, const ControlParams& control,
                        double i_load) {
    circuit.validate();
    control.validate();
    require(i_load >= 0.0, "i_load must be non-negative");

    const double v_pk = kSqrt2 * circuit.v_line_rms;
    const double t_qr0 = control.qr_delay_mode == QrDelayMode::half_ring
                             ? kPi * std::sqrt(circuit.l_primary * circuit.c_oss)
                             : 0.0;

    // Quasi-static line-average input power as a function of ON time.
    auto p_avg = [&](double t_on) {
        const int n = 200;
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            const double ph = kPi * (j + 0.5) / n;
            const double v = std::max(
                v_pk * std::fabs(std::sin(ph)) - 2.0 * circuit.v_f_bridge, 0.0);
            const double i_pk = v * t_on / circuit.l_primary;
            const double t_off =
                i_pk * circuit.l_primary * circuit.n_sp / control.v_ref;
            const double period =
                std::max(t_on + t_off + t_qr0, 1.0 / control.f_sw_max);
            s += 0.5 * circuit.l_primary * i_pk * i_pk / period;
        }
        return s / n;
    };

    // The plant slope dPin/dton is close to Pin/ton here; evaluate it at the
    // ON time that delivers the requested power.
    const double p_target = std::max(control.v_ref * i_load, 5.0) / 0.9;
    double lo = 1e-8, hi = 3e-5, mid = 0.0;
    for (int it = 0; it < 50; ++it) {
        mid = 0.5 * (lo + hi);
        (p_avg(mid) < p_target ? lo : hi) = mid;
    }
    const double alpha = p_avg(mid) / mid;
    require(alpha > 0.0, "operating point gives zero plant gain");

    // Crossover of K * alpha * 0.9 / (s C v_ref) ~= K alpha 0.9 / (2 pi f C vref)
    // collapses to this once the load resistance is folded in.
    return 2.0 * kPi * control.loop_bandwidth * std::max(i_load, 0.1) /
           (0.9 * alpha);
}

SimTrace run_simulation(const CircuitParams& circuit, const ControlParams& control,
                        double i_load, int n_line_cycles, int settle_cycles) {
    circuit.validate();
    control.validate();
    require(i_load >= 0.0, "i_load must be non-negative");
    require(n_line_cycles >= 1, "n_line_cycles must be >= 1");
    require(settle_cycles >= 0, "settle_cycles must be non-negative");

    ControlParams ctl = control;
    if (ctl.gain <= 0.0) ctl.gain = derive_loop_gain(circuit, control, i_load);

    ConverterState state;
    state.v_clamp = 2.0 * ctl.v_ref / circuit.n_sp;
    state.t_on = ctl.t_on_min;

    SimTrace trace;
    trace.f_line = circuit.f_line;
    trace.v_line_rms = circuit.v_line_rms;
    trace.i_load = i_load;
    trace.record_start = settle_cycles / circuit.f_line;

    const double t_end = (settle_cycles + n_line_cycles) / circuit.f_line;
    while (state.sim_time < t_end) {
        const CycleRecord rec = advance_cycle(state, circuit, ctl, i_load);
        controller_update(state, ctl, rec.period);
        if (rec.t_start >= trace.record_start) {
            const double v_line =
                kSqrt2 * circuit.v_line_rms *
                std::fabs(std::sin(2.0 * kPi * circuit.f_line * rec.t_start));
            const double i_avg =
                rec.switched ? rec.e_in / (std::max(v_line, 1e-9) * rec.period)
                             : 0.0;
            trace.cycles.push_back(rec);
            trace.i_in_samples.push_back({rec.t_start, i_avg});
            trace.v_out_samples.push_back({rec.t_start, state.v_out});
        }
    }

    // Settled when the mean output of the last two recorded line cycles agrees
    // to 0.1%.
    if (!trace.v_out_samples.empty() && n_line_cycles >= 2) {
        const double t_last = trace.v_out_samples.back().t;
        double sum1 = 0.0, w1 = 0.0, sum2 = 0.0, w2 = 0.0;
        for (size_t k = 0; k + 1 < trace.v_out_samples.size(); ++k) {
            const auto& a = trace.v_out_samples[k];
            const double dt = trace.v_out_samples[k + 1].t - a.t;
            if (a.t >= t_last - 1.0 / circuit.f_line) {
                sum2 += a.value * dt;
                w2 += dt;
            } else if (a.t >= t_last - 2.0 / circuit.f_line) {
                sum1 += a.value * dt;
                w1 += dt;
            }
        }
        if (w1 > 0.0 && w2 > 0.0) {
            const double m1 = sum1 / w1, m2 = sum2 / w2;
            trace.settled = std::fabs(m2 - m1) <= 1e-3 * std::fabs(m2);
        }
    }
    return trace;
}

void write_waveform_csv(const SimTrace& trace, const CircuitParams& circuit,
                        const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::fprintf(f, "time_s,v_in_rect_V,i_in_avg_A,v_out_V,f_sw_Hz\n");
    for (size_t k = 0; k < trace.cycles.size(); ++k) {
        const auto& c = trace.cycles[k];
        const double v_rect =
            kSqrt2 * circuit.v_line_rms *
            std::fabs(std::sin(2.0 * kPi * circuit.f_line * c.t_start));
        const double f_sw = c.switched ? 1.0 / c.period : 0.0;
        std::fprintf(f, "%.9e,%.9e,%.9e,%.9e,%.9e\n", c.t_start, v_rect,
                     trace.i_in_samples[k].value, trace.v_out_samples[k].value,
                     f_sw);
    }
    std::fclose(f);
}

void write_cycles_csv(const SimTrace& trace, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::fprintf(f,
                 "t_start_s,t_on_s,t_off_s,i_pk_A,"
                 "loss_conduction_primary_J,loss_conduction_secondary_channel_J,"
                 "loss_conduction_secondary_body_J,loss_switching_coss_J,"
                 "loss_snubber_J,loss_bridge_J,loss_cap_esr_J,loss_total_J\n");
    for (const auto& c : trace.cycles) {
        std::fprintf(f,
                     "%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,%.9e,"
                     "%.9e\n",
                     c.t_start, c.t_on, c.t_off, c.i_pk_primary,
                     c.losses.conduction_primary,
                     c.losses.conduction_secondary_channel,
                     c.losses.conduction_secondary_body_diode,
                     c.losses.switching_coss, c.losses.snubber, c.losses.bridge,
                     c.losses.cap_esr, c.losses.total);
    }
    std::fclose(f);
}

}  // namespace pfc
