#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pfc {

// Every physical component value the cycle model needs. SI base units.
struct CircuitParams {
    double l_primary = 160e-6;        // henries
    double l_leakage = 3.75e-6;       // henries
    double n_sp = 0.15;               // Ns/Np
    double c_out = 1410e-6;           // farads
    double c_out_esr = 0.0;           // ohms
    double c_oss = 440e-12;           // primary switch output capacitance, farads
    double r_dson_primary = 0.36;     // ohms
    double r_dson_secondary = 7.3e-3; // ohms
    double v_f_body = 0.7;            // secondary body-diode drop, volts
    double v_f_bridge = 0.7;          // per bridge diode, volts
    double r_snubber = 75e3;          // ohms
    double c_snubber = 2.2e-9;        // farads
    double v_line_rms = 120.0;        // volts
    double f_line = 60.0;             // hertz

    void validate() const;
};

enum class QrDelayMode : std::uint8_t { none, half_ring };

struct ControlParams {
    double t_on_min = 1.2e-6;      // seconds
    double t_on_max = 15e-6;       // seconds
    double f_sw_max = 300e3;       // restart clamp, hertz
    double loop_bandwidth = 10.0;  // hertz; must stay well below f_line
    double v_ref = 24.0;           // volts
    double soft_start_time = 20e-3;// seconds
    QrDelayMode qr_delay_mode = QrDelayMode::half_ring;
    double gain = 0.0;             // t_on per volt-second; 0 = derived from
                                   // loop_bandwidth at simulation start

    void validate() const;
};

// Synchronous rectifier controller thresholds (Vds sensing).
inline constexpr double kSrGateOnThreshold = -0.23;    // volts
inline constexpr double kSrGateOffLow = -8e-3;         // volts
inline constexpr double kSrGateOffHigh = -4e-3;        // volts
inline constexpr double kSrConductionThreshold = -0.2; // volts, off -> body_diode
inline constexpr double kSrDetectDelay = 200e-9;       // seconds, body diode before gate on
inline constexpr double kSrMinGateOn = 500e-9;         // seconds, chatter guard
inline constexpr double kSrUvlo = 4.0;                 // volts, gate drive inactive below

enum class SrPhase : std::uint8_t { off, body_diode, gate_on };

struct SyncRectState {
    SrPhase phase = SrPhase::off;
    double v_ds = 0.0;  // volts, last sensed drain-source voltage
};

// Threshold state machine. gate_on is reachable only from body_diode.
SyncRectState sync_rect_transition(SyncRectState sr, double v_ds);

struct LossBreakdown {
    double conduction_primary = 0.0;
    double conduction_secondary_channel = 0.0;
    double conduction_secondary_body_diode = 0.0;
    double switching_coss = 0.0;
    double snubber = 0.0;
    double bridge = 0.0;
    double cap_esr = 0.0;   // output capacitor ESR
    double total = 0.0;     // sum of the above
};

struct CycleRecord {
    double t_start = 0.0;
    double v_in_inst = 0.0;     // rectified line minus bridge drops, at cycle start
    double t_on = 0.0;
    double t_off = 0.0;
    double t_qr = 0.0;          // quasi-resonant delay plus any restart-clamp wait
    double period = 0.0;        // == t_on + t_off + t_qr
    double i_pk_primary = 0.0;
    double i_pk_secondary = 0.0;
    double e_in = 0.0;          // joules drawn from the line
    double e_out = 0.0;         // joules delivered to the output node
    bool switched = false;      // false for skipped / zero-voltage cycles
    LossBreakdown losses;
};

struct ConverterState {
    double line_phase = 0.0;    // radians
    double v_out = 0.0;         // volts
    double t_on = 0.0;          // currently commanded ON time, seconds
    double integrator = 0.0;    // volt-seconds
    double v_clamp = 0.0;       // snubber capacitor voltage, volts
    SyncRectState sync_rect;
    double sim_time = 0.0;      // seconds
};

struct TimePoint {
    double t = 0.0;
    double value = 0.0;
};

struct SimTrace {
    std::vector<CycleRecord> cycles;
    std::vector<TimePoint> i_in_samples;   // per-switching-cycle average input current
    std::vector<TimePoint> v_out_samples;
    bool settled = false;
    double f_line = 60.0;
    double v_line_rms = 0.0;
    double i_load = 0.0;
    double record_start = 0.0;  // sim time where the recorded window begins
};

// Gate-on interval of the sync rectifier within [0, t_off], plus flags.
struct SrTrajectory {
    bool active = false;    // gate drive operated this cycle
    double t_gate_on = 0.0; // seconds into t_off
    double t_gate_off = 0.0;
};

// Loss model for one switching cycle given its geometry.
LossBreakdown cycle_losses(const CircuitParams& circuit, double i_pk_primary,
                           double t_on, double t_off, double period,
                           const SrTrajectory& sr, double v_in_inst,
                           double v_reflected, double v_clamp, double i_load);

// Steady-state snubber clamp voltage for which R dissipation balances the
// captured leakage energy. Throws std::domain_error for invalid inputs.
double solve_clamp_voltage(const CircuitParams& circuit, double i_pk, double f_sw,
                           double v_reflected);

// Advances the converter by one switching cycle.
CycleRecord advance_cycle(ConverterState& state, const CircuitParams& circuit,
                          const ControlParams& control, double i_load);

// Integrator update; returns the new commanded ON time.
double controller_update(ConverterState& state, const ControlParams& control, double dt);

// Derives the integrator gain that places the loop crossover at
// control.loop_bandwidth for the given operating point.
double derive_loop_gain(const CircuitParams& circuit, const ControlParams& control,
                        double i_load);

SimTrace run_simulation(const CircuitParams& circuit, const ControlParams& control,
                        double i_load, int n_line_cycles, int settle_cycles);

// CSV export per the fixed column layouts.
void write_waveform_csv(const SimTrace& trace, const CircuitParams& circuit,
                        const std::string& path);
void write_cycles_csv(const SimTrace& trace, const std::string& path);

}  // namespace pfc
