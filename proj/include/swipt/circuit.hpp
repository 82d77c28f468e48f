#pragma once

#include <cstdint>
#include <vector>

#include "swipt/errors.hpp"

namespace swipt {

enum class DiodeState { Off, On };

/// Physical constants of the half-wave rectifier. Defaults are the
/// reference operating point used throughout the experiments
/// (800 MHz carrier, 10 nF, Rs = 50, Ron = 5, Roff = 10M, Von = 0.25 V).
struct CircuitParams {
    double capacitance = 10e-9;       // C [F]
    double source_resistance = 50.0;  // Rs [ohm]
    double on_resistance = 5.0;       // Ron [ohm]
    double off_resistance = 10e6;     // Roff [ohm]
    double load_resistance = 1e3;     // Rl [ohm]
    double diode_threshold = 0.25;    // Von [V]
    double carrier_frequency = 800e6; // f [Hz]

    // Open-circuit loads are modeled with a large finite resistance so
    // a single code path covers both regimes.
    static constexpr double kOpenLoad = 10e6;

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

struct DerivedConstants {
    double omega; // 2*pi*f [rad/s]
    double t_on;  // C*(Rs+Ron) [s]
    double t_off; // C*(Rs+Roff) [s]
    double alpha; // 1/t_on + 1/(Rl*C) [1/s]
    double beta;  // 1/t_off + 1/(Rl*C) [1/s]
};

DerivedConstants derive_constants(const CircuitParams& params);

/// Initial conditions of one diode-state segment. The closed-form
/// expressions below propagate the capacitor voltage from here until
/// the next switch.
struct SegmentStart {
    double start_time = 0.0;    // t0 [s]
    double start_voltage = 0.0; // Vc(t0) [V]
    DiodeState state = DiodeState::Off;
    double drive_amplitude = 0.0; // source amplitude active in this segment [V]
};

// Closed-form capacitor voltage while the diode conducts, valid for
// t >= seg.start_time within a single forward-biased segment.
double segment_voltage_on(double t, const SegmentStart& seg,
                          const DerivedConstants& k, double von);

// Closed-form capacitor voltage while the diode is reverse biased.
double segment_voltage_off(double t, const SegmentStart& seg,
                           const DerivedConstants& k);

// True when the diode must leave `state` given the instantaneous source
// and capacitor voltages.
bool diode_switch_predicate(DiodeState state, double vs, double vc,
                            const CircuitParams& params);

struct BranchCurrents {
    double diode;     // [A]
    double capacitor; // [A]
    double load;      // [A]
};

// Observability helper; not used by the propagation loop.
BranchCurrents branch_currents(DiodeState state, double vs, double vc,
                               double dvc_dt, const CircuitParams& params);

/// One piecewise-constant amplitude interval of the source
/// Vs(t) = A(t)*sin(omega*t). The carrier phase is global: amplitude
/// changes never reset it.
struct DriveSegment {
    double duration;  // [s], > 0
    double amplitude; // [V], >= 0
};

using Drive = std::vector<DriveSegment>;

struct SwitchEvent {
    double time;
    DiodeState new_state;
};

struct Trajectory {
    std::vector<double> sample_times;   // strictly increasing [s]
    std::vector<double> output_voltage; // Vc at each sample [V]
    std::vector<SwitchEvent> switch_events;
    int samples_per_period = 0;
};

// Switch instants are detected on the sampling grid. Bisect refines the
// crossing inside the last sample interval before starting the new
// segment.
enum class SwitchRefine { GridOnly, Bisect };

/// Chains the closed-form segment solutions across diode switches and
/// drive-amplitude boundaries, starting from a reverse-biased diode at
/// `initial_voltage`. Samples land on a uniform grid of
/// `samples_per_period` points per carrier period; the value at each
/// drive boundary is additionally evaluated exactly.
Trajectory simulate_transient(const CircuitParams& params, const Drive& drive,
                              int samples_per_period, double initial_voltage,
                              SwitchRefine refine = SwitchRefine::GridOnly);

/// Independent fixed-step RK4 integration of the state-dependent ODE,
/// using the same switch predicates. `step` must resolve the carrier
/// with at least 200 steps per period. When `check_samples_per_period`
/// is nonzero, the predicate is evaluated (and samples are recorded) on
/// that coarser grid while the integration itself keeps `step`;
/// otherwise every integration step is a check instant.
Trajectory simulate_transient_oracle(const CircuitParams& params,
                                     const Drive& drive, double step,
                                     double initial_voltage,
                                     int check_samples_per_period = 0);

struct SteadyState {
    double level;       // settled per-period mean of Vc [V]
    double settle_time; // first time the per-period mean is within tolerance [s]
};

/// Charges the rectifier from an empty capacitor under constant drive
/// amplitude and locates the steady state of the per-carrier-period
/// mean. `horizon <= 0` defaults to 100*Rl*C.
SteadyState steady_state_output(const CircuitParams& params, double amplitude,
                                double rel_tolerance, double horizon = 0.0,
                                int samples_per_period = 100);

/// Streams a per-symbol constant-amplitude drive through the rectifier
/// and returns Vc evaluated exactly at the end of each symbol period.
std::vector<double> end_of_symbol_samples(const CircuitParams& params,
                                          const std::vector<double>& amplitudes,
                                          double symbol_period,
                                          int samples_per_period,
                                          double initial_voltage);

} // namespace swipt
