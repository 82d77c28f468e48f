#include "swipt/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swipt {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double phase_sin(double f, double t) {
    return std::sin(kTwoPi * std::fmod(f * t, 1.0));
}

void phase_sincos(double f, double t, double& s, double& c) {
    double ph = kTwoPi * std::fmod(f * t, 1.0);
    s = std::sin(ph);
    c = std::cos(ph);
}

// sin/cos of the carrier at the uniform sampling grid; sample n has
// phase index n mod N.
struct PhaseTable {
    explicit PhaseTable(int n) : sin_(n), cos_(n) {
        for (int i = 0; i < n; ++i) {
            double ph = kTwoPi * static_cast<double>(i) / n;
            sin_[i] = std::sin(ph);
            cos_[i] = std::cos(ph);
        }
    }
    std::vector<double> sin_, cos_;
};

// Closed-form segment in the common shape
//   Vc(t) = c0 - pc*(omega*cos(wt) - rate*sin(wt)) + k*exp(-rate*(t-t0))
// covering both diode states (rate = alpha or beta, c0 = -Von/(alpha*Ton)
// or 0).
struct Segment {
    double t0 = 0.0;
    double v0 = 0.0;
    double amplitude = 0.0;
    DiodeState state = DiodeState::Off;
    double rate = 0.0;
    double c0 = 0.0;
    double pc = 0.0;
    double k = 0.0;
};

double segment_particular(const Segment& seg, double omega, double s, double c) {
    return seg.c0 - seg.pc * (omega * c - seg.rate * s);
}

double segment_eval(const Segment& seg, double omega, double t, double s,
                    double c) {
    return segment_particular(seg, omega, s, c) +
           seg.k * std::exp(-seg.rate * (t - seg.t0));
}

double segment_eval(const Segment& seg, double omega, double f, double t) {
    double s, c;
    phase_sincos(f, t, s, c);
    return segment_eval(seg, omega, t, s, c);
}

Segment make_segment(const CircuitParams& p, const DerivedConstants& k,
                     DiodeState state, double t0, double v0, double amplitude) {
    Segment seg;
    seg.t0 = t0;
    seg.v0 = v0;
    seg.amplitude = amplitude;
    seg.state = state;
    if (state == DiodeState::On) {
        seg.rate = k.alpha;
        seg.c0 = -p.diode_threshold / (k.alpha * k.t_on);
        seg.pc = amplitude / (k.t_on * (k.alpha * k.alpha + k.omega * k.omega));
    } else {
        seg.rate = k.beta;
        seg.c0 = 0.0;
        seg.pc = amplitude / (k.t_off * (k.beta * k.beta + k.omega * k.omega));
    }
    double s, c;
    phase_sincos(p.carrier_frequency, t0, s, c);
    seg.k = v0 - segment_particular(seg, k.omega, s, c);
    return seg;
}

DiodeState flipped(DiodeState s) {
    return s == DiodeState::On ? DiodeState::Off : DiodeState::On;
}

// Predicate margin, positive while the current state persists.
double switch_margin(const Segment& seg, const CircuitParams& p,
                     const DerivedConstants& k, double t) {
    double s, c;
    phase_sincos(p.carrier_frequency, t, s, c);
    double vc = segment_eval(seg, k.omega, t, s, c);
    double vs = seg.amplitude * s;
    if (seg.state == DiodeState::On)
        return vs - vc - p.diode_threshold;
    return p.diode_threshold -
           (vs - vc) * p.off_resistance / (p.source_resistance + p.off_resistance);
}

// Bisects the switching instant inside (tlo, thi]; returns thi unchanged
// when no sign change brackets the crossing.
double localize_switch(const Segment& seg, const CircuitParams& p,
                       const DerivedConstants& k, double tlo, double thi) {
    if (!(switch_margin(seg, p, k, tlo) > 0.0)) return thi;
    double a = tlo, b = thi;
    for (int i = 0; i < 64 && (b - a) > 1e-9 * (thi - tlo); ++i) {
        double m = 0.5 * (a + b);
        if (switch_margin(seg, p, k, m) > 0.0)
            a = m;
        else
            b = m;
    }
    return b;
}

void check_drive(const Drive& drive) {
    if (drive.empty()) throw std::invalid_argument("drive schedule is empty");
    for (const auto& d : drive) {
        if (!(d.duration > 0.0) || !std::isfinite(d.duration))
            throw std::invalid_argument("drive durations must be positive");
        if (!(d.amplitude >= 0.0) || !std::isfinite(d.amplitude))
            throw std::invalid_argument("drive amplitudes must be >= 0");
    }
}

// Algorithm core shared by all closed-form entry points. The sink sees
//   sample(t, v)      -> false to stop early
//   switch_event(t, state)
//   boundary(entry_index, t, v)   at the end of every drive entry
template <typename Sink>
void run_closed_form(const CircuitParams& p, const Drive& drive,
                     int samples_per_period, double initial_voltage,
                     SwitchRefine refine, Sink&& sink) {
    p.validate();
    check_drive(drive);
    if (samples_per_period < 2)
        throw std::invalid_argument("samples_per_period must be >= 2");
    if (!std::isfinite(initial_voltage))
        throw std::invalid_argument("initial_voltage must be finite");

    const DerivedConstants k = derive_constants(p);
    const int N = samples_per_period;
    const double dt = 1.0 / (p.carrier_frequency * N);
    const double grid_tol = dt * 1e-9;
    const PhaseTable tab(N);

    std::size_t entry = 0;
    double amplitude = drive[0].amplitude;
    double boundary = drive[0].duration;
    Segment seg = make_segment(p, k, DiodeState::Off, 0.0, initial_voltage,
                               amplitude);
    long long n = 0;

    while (entry < drive.size()) {
        double t = static_cast<double>(n) * dt;
        if (t >= boundary - grid_tol) {
            // End of the current drive entry: evaluate exactly at the
            // boundary and restart the segment with the next amplitude.
            double vb = segment_eval(seg, k.omega, p.carrier_frequency, boundary);
            sink.boundary(entry, boundary, vb);
            ++entry;
            if (entry == drive.size()) return;
            amplitude = drive[entry].amplitude;
            seg = make_segment(p, k, seg.state, boundary, vb, amplitude);
            boundary += drive[entry].duration;
            continue;
        }

        double s = tab.sin_[n % N];
        double c = tab.cos_[n % N];
        double v = segment_eval(seg, k.omega, t, s, c);
        double vs = amplitude * s;
        if (diode_switch_predicate(seg.state, vs, v, p)) {
            DiodeState next = flipped(seg.state);
            double t_switch = t;
            double v_switch = v;
            if (refine == SwitchRefine::Bisect && t - dt > seg.t0) {
                t_switch = localize_switch(seg, p, k, t - dt, t);
                v_switch = segment_eval(seg, k.omega, p.carrier_frequency,
                                        t_switch);
            }
            sink.switch_event(t_switch, next);
            seg = make_segment(p, k, next, t_switch, v_switch, amplitude);
            if (t_switch < t) v = segment_eval(seg, k.omega, t, s, c);
        }
        if (!sink.sample(t, v)) return;
        ++n;
    }
}

struct TrajectorySink {
    Trajectory* out;
    bool sample(double t, double v) {
        if (!out->sample_times.empty() &&
            t <= out->sample_times.back() + 1e-18)
            return true; // boundary already recorded this instant
        out->sample_times.push_back(t);
        out->output_voltage.push_back(v);
        return true;
    }
    void switch_event(double t, DiodeState s) {
        out->switch_events.push_back({t, s});
    }
    void boundary(std::size_t, double t, double v) { sample(t, v); }
};

} // namespace

void CircuitParams::validate() const {
    auto pos = [](double x) { return std::isfinite(x) && x > 0.0; };
    if (!pos(capacitance)) throw std::invalid_argument("capacitance must be > 0");
    if (!pos(source_resistance) || !pos(on_resistance) ||
        !pos(off_resistance) || !pos(load_resistance))
        throw std::invalid_argument("resistances must be > 0");
    if (off_resistance <= on_resistance)
        throw std::invalid_argument("off_resistance must exceed on_resistance");
    if (!(std::isfinite(diode_threshold) && diode_threshold >= 0.0))
        throw std::invalid_argument("diode_threshold must be >= 0");
    if (!pos(carrier_frequency))
        throw std::invalid_argument("carrier_frequency must be > 0");
}

DerivedConstants derive_constants(const CircuitParams& p) {
    p.validate();
    DerivedConstants k;
    k.omega = kTwoPi * p.carrier_frequency;
    k.t_on = p.capacitance * (p.source_resistance + p.on_resistance);
    k.t_off = p.capacitance * (p.source_resistance + p.off_resistance);
    double load_rate = 1.0 / (p.load_resistance * p.capacitance);
    k.alpha = 1.0 / k.t_on + load_rate;
    k.beta = 1.0 / k.t_off + load_rate;
    return k;
}

double segment_voltage_on(double t, const SegmentStart& seg,
                          const DerivedConstants& k, double von) {
    double s0, c0, s, c;
    double f = k.omega / kTwoPi;
    phase_sincos(f, seg.start_time, s0, c0);
    phase_sincos(f, t, s, c);
    double denom = k.t_on * (k.alpha * k.alpha + k.omega * k.omega);
    double bias = -von / (k.alpha * k.t_on);
    double part = bias - seg.drive_amplitude * (k.omega * c - k.alpha * s) / denom;
    double part0 =
        bias - seg.drive_amplitude * (k.omega * c0 - k.alpha * s0) / denom;
    return part + (seg.start_voltage - part0) *
                      std::exp(-k.alpha * (t - seg.start_time));
}

double segment_voltage_off(double t, const SegmentStart& seg,
                           const DerivedConstants& k) {
    double s0, c0, s, c;
    double f = k.omega / kTwoPi;
    phase_sincos(f, seg.start_time, s0, c0);
    phase_sincos(f, t, s, c);
    double denom = k.t_off * (k.beta * k.beta + k.omega * k.omega);
    double part = -seg.drive_amplitude * (k.omega * c - k.beta * s) / denom;
    double part0 = -seg.drive_amplitude * (k.omega * c0 - k.beta * s0) / denom;
    return part + (seg.start_voltage - part0) *
                      std::exp(-k.beta * (t - seg.start_time));
}

bool diode_switch_predicate(DiodeState state, double vs, double vc,
                            const CircuitParams& p) {
    if (state == DiodeState::On) {
        return (vs - vc - p.diode_threshold) * p.on_resistance /
                   (p.source_resistance + p.on_resistance) <
               0.0;
    }
    return (vs - vc) * p.off_resistance /
               (p.source_resistance + p.off_resistance) >=
           p.diode_threshold;
}

BranchCurrents branch_currents(DiodeState state, double vs, double vc,
                               double dvc_dt, const CircuitParams& p) {
    BranchCurrents out;
    out.capacitor = p.capacitance * dvc_dt;
    out.load = vc / p.load_resistance;
    if (state == DiodeState::On)
        out.diode = (vs - p.diode_threshold - vc) /
                    (p.source_resistance + p.on_resistance);
    else
        out.diode = (vs - vc) / (p.source_resistance + p.off_resistance);
    return out;
}

Trajectory simulate_transient(const CircuitParams& params, const Drive& drive,
                              int samples_per_period, double initial_voltage,
                              SwitchRefine refine) {
    Trajectory traj;
    check_drive(drive);
    traj.samples_per_period = samples_per_period;
    double total = 0.0;
    for (const auto& d : drive) total += d.duration;
    auto count = static_cast<std::size_t>(
        total * params.carrier_frequency * samples_per_period + drive.size() + 2);
    traj.sample_times.reserve(count);
    traj.output_voltage.reserve(count);
    TrajectorySink sink{&traj};
    run_closed_form(params, drive, samples_per_period, initial_voltage, refine,
                    sink);
    return traj;
}

Trajectory simulate_transient_oracle(const CircuitParams& params,
                                     const Drive& drive, double step,
                                     double initial_voltage,
                                     int check_samples_per_period) {
    params.validate();
    check_drive(drive);
    if (!std::isfinite(initial_voltage))
        throw std::invalid_argument("initial_voltage must be finite");
    const double period = 1.0 / params.carrier_frequency;
    if (!(step > 0.0) || step > period / 200.0)
        throw std::invalid_argument(
            "oracle step must give at least 200 steps per carrier period");

    const DerivedConstants k = derive_constants(params);
    const double f = params.carrier_frequency;
    const double von = params.diode_threshold;

    double check_dt =
        check_samples_per_period > 0 ? period / check_samples_per_period : step;
    const long long nsub = std::max<long long>(1, std::llround(check_dt / step));

    Trajectory traj;
    traj.samples_per_period =
        static_cast<int>(std::llround(period / check_dt));

    DiodeState state = DiodeState::Off;
    double v = initial_voltage;
    double t_entry = 0.0;
    double amp_ = 0.0;

    auto rhs = [&](double vsin, double vc) {
        if (state == DiodeState::On)
            return (vsin - von) / k.t_on - k.alpha * vc;
        return vsin / k.t_off - k.beta * vc;
    };
    auto rk4_interval = [&](double t0, double t1) {
        // fixed substeps across [t0, t1), state held constant
        long long m = std::max<long long>(
            1, std::llround((t1 - t0) / check_dt * static_cast<double>(nsub)));
        double h = (t1 - t0) / static_cast<double>(m);
        for (long long j = 0; j < m; ++j) {
            double t = t0 + h * static_cast<double>(j);
            double s0 = phase_sin(f, t);
            double sm = phase_sin(f, t + 0.5 * h);
            double s1 = phase_sin(f, t + h);
            double a0 = amp_ * s0, am = amp_ * sm, a1 = amp_ * s1;
            double k1 = rhs(a0, v);
            double k2 = rhs(am, v + 0.5 * h * k1);
            double k3 = rhs(am, v + 0.5 * h * k2);
            double k4 = rhs(a1, v + h * k3);
            v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    };

    for (std::size_t entry = 0; entry < drive.size(); ++entry) {
        amp_ = drive[entry].amplitude;
        double t_end = t_entry + drive[entry].duration;
        long long checks = static_cast<long long>(
            std::floor((t_end - t_entry) / check_dt * (1.0 + 1e-12)));
        double t_prev = t_entry;
        for (long long j = 0; j <= checks; ++j) {
            double t = t_entry + static_cast<double>(j) * check_dt;
            if (t > t_end - 1e-9 * check_dt) break;
            if (t > t_prev) rk4_interval(t_prev, t);
            t_prev = t;
            if (traj.sample_times.empty() ||
                t > traj.sample_times.back() + 1e-18) {
                traj.sample_times.push_back(t);
                traj.output_voltage.push_back(v);
            }
            double vs = amp_ * phase_sin(f, t);
            if (diode_switch_predicate(state, vs, v, params)) {
                state = flipped(state);
                traj.switch_events.push_back({t, state});
            }
        }
        if (t_end > t_prev) rk4_interval(t_prev, t_end);
        traj.sample_times.push_back(t_end);
        traj.output_voltage.push_back(v);
        t_entry = t_end;
    }
    return traj;
}

SteadyState steady_state_output(const CircuitParams& params, double amplitude,
                                double rel_tolerance, double horizon,
                                int samples_per_period) {
    params.validate();
    if (!(amplitude > params.diode_threshold))
        throw NotConducting("drive amplitude does not exceed diode threshold");
    if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0))
        throw std::invalid_argument("rel_tolerance must lie in (0, 1)");
    if (horizon <= 0.0)
        horizon = 100.0 * params.load_resistance * params.capacitance;

    const double period = 1.0 / params.carrier_frequency;
    // Window long enough that the charging envelope moves measurably
    // between compared periods; the per-carrier-period change alone is
    // far below any useful tolerance.
    const long long window = std::clamp<long long>(
        std::llround(params.load_resistance * params.capacitance /
                     period),
        100, 20000);
    const double mean_tol = rel_tolerance * 1e-2;

    struct MeanSink {
        int n_per_period;
        long long window;
        double mean_tol;
        long long count = 0;
        double acc = 0.0;
        std::vector<double> means;
        bool converged = false;
        bool sample(double, double v) {
            acc += v;
            if (++count % n_per_period == 0) {
                means.push_back(acc / n_per_period);
                acc = 0.0;
                std::size_t p = means.size() - 1;
                if (static_cast<long long>(p) >= window) {
                    double m = means[p];
                    double prev = means[p - window];
                    if (std::abs(m - prev) <
                        mean_tol * std::max(std::abs(m), 1e-300)) {
                        converged = true;
                        return false;
                    }
                }
            }
            return true;
        }
        void switch_event(double, DiodeState) {}
        void boundary(std::size_t, double, double) {}
    } sink{samples_per_period, window, mean_tol, 0, 0.0, {}, false};

    Drive drive{{horizon, amplitude}};
    run_closed_form(params, drive, samples_per_period, 0.0,
                    SwitchRefine::GridOnly, sink);
    if (!sink.converged)
        throw NoConvergence("steady state not reached within horizon");

    double level = sink.means.back();
    double settle = horizon;
    for (std::size_t q = 0; q < sink.means.size(); ++q) {
        if (std::abs(sink.means[q] - level) <=
            rel_tolerance * std::abs(level)) {
            settle = static_cast<double>(q + 1) * period;
            break;
        }
    }
    return {level, settle};
}

std::vector<double> end_of_symbol_samples(const CircuitParams& params,
                                          const std::vector<double>& amplitudes,
                                          double symbol_period,
                                          int samples_per_period,
                                          double initial_voltage) {
    if (!(symbol_period > 0.0))
        throw std::invalid_argument("symbol_period must be > 0");
    Drive drive;
    drive.reserve(amplitudes.size());
    for (double a : amplitudes) drive.push_back({symbol_period, a});

    struct BoundarySink {
        std::vector<double> values;
        bool sample(double, double) { return true; }
        void switch_event(double, DiodeState) {}
        void boundary(std::size_t, double, double v) { values.push_back(v); }
    } sink;
    sink.values.reserve(amplitudes.size());
    run_closed_form(params, drive, samples_per_period, initial_voltage,
                    SwitchRefine::GridOnly, sink);
    return sink.values;
}

} // namespace swipt
