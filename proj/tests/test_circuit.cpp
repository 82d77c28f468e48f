#include <doctest.h>

#include <cmath>
#include <numbers>

#include "swipt/circuit.hpp"

using namespace swipt;

namespace {

// Test-local RK4 on the per-state ODE, independent of the library's
// oracle and of the closed forms.
double rk4_segment(const CircuitParams& p, DiodeState state, double amplitude,
                   double t0, double v0, double t1, long long steps) {
    auto k = derive_constants(p);
    auto rhs = [&](double t, double v) {
        double vs = amplitude * std::sin(k.omega * t);
        if (state == DiodeState::On)
            return (vs - p.diode_threshold) / k.t_on - k.alpha * v;
        return vs / k.t_off - k.beta * v;
    };
    double h = (t1 - t0) / static_cast<double>(steps);
    double v = v0;
    for (long long i = 0; i < steps; ++i) {
        double t = t0 + h * static_cast<double>(i);
        double k1 = rhs(t, v);
        double k2 = rhs(t + 0.5 * h, v + 0.5 * h * k1);
        double k3 = rhs(t + 0.5 * h, v + 0.5 * h * k2);
        double k4 = rhs(t + h, v + h * k3);
        v += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return v;
}

} // namespace

TEST_CASE("derived constants match their defining formulas") {
    CircuitParams p;
    auto k = derive_constants(p);
    CHECK(k.t_on == doctest::Approx(5.5e-7).epsilon(1e-12));
    CHECK(k.omega ==
          doctest::Approx(1.6e9 * std::numbers::pi).epsilon(1e-12));
    CHECK(k.alpha == doctest::Approx(1.0 / 5.5e-7 + 1e5).epsilon(1e-12));
    CHECK(k.t_off > k.t_on);
    CHECK(k.alpha > k.beta);
    CHECK(k.beta > 0.0);
}

TEST_CASE("parameter invariants are enforced") {
    CircuitParams p;
    p.capacitance = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = CircuitParams{};
    p.off_resistance = p.on_resistance;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = CircuitParams{};
    p.carrier_frequency = -1.0;
    CHECK_THROWS_AS(derive_constants(p), std::invalid_argument);
}

TEST_CASE("on-segment closed form") {
    CircuitParams p;
    auto k = derive_constants(p);
    // first turn-on instant from an empty capacitor
    double t_on = std::asin(p.diode_threshold) / k.omega;
    SegmentStart seg{t_on, 0.0, DiodeState::On, 1.0};

    SUBCASE("continuity at the initial instant") {
        CHECK(segment_voltage_on(t_on, seg, k, p.diode_threshold) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("long-time value stays near the forced solution") {
        double bias = -p.diode_threshold / (k.alpha * k.t_on);
        double ripple = seg.drive_amplitude /
                        (k.t_on * std::sqrt(k.alpha * k.alpha +
                                            k.omega * k.omega));
        double t = t_on + 20.0 / k.alpha;
        double v = segment_voltage_on(t, seg, k, p.diode_threshold);
        CHECK(std::abs(v - bias) <= ripple * (1.0 + 1e-9));
    }
    SUBCASE("matches independent RK4 over one carrier period") {
        double t1 = t_on + 1.0 / p.carrier_frequency;
        double expected = rk4_segment(p, DiodeState::On, 1.0, t_on, 0.0, t1,
                                      50000);
        CHECK(segment_voltage_on(t1, seg, k, p.diode_threshold) ==
              doctest::Approx(expected).epsilon(0).scale(1).epsilon(1e-9));
    }
}

TEST_CASE("off-segment closed form") {
    CircuitParams p;
    auto k = derive_constants(p);
    SegmentStart seg{0.0, 0.5, DiodeState::Off, 1.0};

    SUBCASE("continuity at the initial instant") {
        CHECK(segment_voltage_off(0.0, seg, k) == doctest::Approx(0.5));
    }
    SUBCASE("zero amplitude decays exponentially") {
        SegmentStart quiet{0.0, 0.5, DiodeState::Off, 0.0};
        double t = 3e-6;
        CHECK(segment_voltage_off(t, quiet, k) ==
              doctest::Approx(0.5 * std::exp(-k.beta * t)).epsilon(1e-12));
    }
    SUBCASE("matches independent RK4 over one carrier period") {
        double t1 = 1.0 / p.carrier_frequency;
        double expected =
            rk4_segment(p, DiodeState::Off, 1.0, 0.0, 0.5, t1, 50000);
        CHECK(std::abs(segment_voltage_off(t1, seg, k) - expected) < 1e-9);
    }
}

TEST_CASE("diode switch predicate") {
    CircuitParams p;
    CHECK_FALSE(diode_switch_predicate(DiodeState::Off, 0.0, 0.0, p));
    CHECK(diode_switch_predicate(DiodeState::Off, 1.0, 0.0, p));
    CHECK(diode_switch_predicate(DiodeState::On, 0.2, 0.1, p));
    CHECK_FALSE(diode_switch_predicate(DiodeState::On, 0.8, 0.1, p));
}

TEST_CASE("branch currents") {
    CircuitParams p;
    SUBCASE("zero input") {
        auto i = branch_currents(DiodeState::Off, 0.0, 0.0, 0.0, p);
        CHECK(i.diode == 0.0);
        CHECK(i.capacitor == 0.0);
        CHECK(i.load == 0.0);
    }
    SUBCASE("load follows Ohm's law") {
        auto i = branch_currents(DiodeState::Off, 0.0, 0.5, 0.0, p);
        CHECK(i.load == doctest::Approx(0.5e-3));
    }
    SUBCASE("Kirchhoff balance along a simulated trajectory") {
        Drive d{{0.5e-6, 1.0}};
        auto traj = simulate_transient(p, d, 2000, 0.0);
        auto k = derive_constants(p);
        std::size_t ev = 0;
        DiodeState state = DiodeState::Off;
        double dt = traj.sample_times[1] - traj.sample_times[0];
        int checked = 0;
        for (std::size_t i = 1; i + 1 < traj.sample_times.size(); ++i) {
            while (ev < traj.switch_events.size() &&
                   traj.switch_events[ev].time <= traj.sample_times[i])
                state = traj.switch_events[ev++].new_state;
            // stay away from switch instants so the FD derivative is clean
            if (ev < traj.switch_events.size() &&
                std::abs(traj.switch_events[ev].time - traj.sample_times[i]) <
                    3 * dt)
                continue;
            if (ev > 0 &&
                std::abs(traj.switch_events[ev - 1].time -
                         traj.sample_times[i]) < 3 * dt)
                continue;
            double dvdt = (traj.output_voltage[i + 1] -
                           traj.output_voltage[i - 1]) /
                          (2 * dt);
            double vs = std::sin(k.omega * traj.sample_times[i]);
            auto cur = branch_currents(state, vs, traj.output_voltage[i],
                                       dvdt, p);
            CHECK(cur.diode ==
                  doctest::Approx(cur.capacitor + cur.load).epsilon(0.05));
            ++checked;
        }
        CHECK(checked > 100);
    }
}

TEST_CASE("transient simulation basics") {
    CircuitParams p;
    SUBCASE("zero drive from empty capacitor is identically zero") {
        Drive d{{2e-6, 0.0}};
        auto traj = simulate_transient(p, d, 100, 0.0);
        for (double v : traj.output_voltage) CHECK(v == 0.0);
        CHECK(traj.switch_events.empty());
    }
    SUBCASE("rejects bad inputs") {
        CHECK_THROWS_AS(simulate_transient(p, {}, 100, 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(simulate_transient(p, {{1e-6, 1.0}}, 1, 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(simulate_transient(p, {{-1e-6, 1.0}}, 100, 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(simulate_transient(p, {{1e-6, 1.0}}, 100,
                                           std::nan("")),
                        std::invalid_argument);
    }
    SUBCASE("boundedness and monotone sample times") {
        Drive d{{3e-6, 1.0}, {3e-6, 0.5}};
        auto traj = simulate_transient(p, d, 100, 0.0);
        for (std::size_t i = 1; i < traj.sample_times.size(); ++i)
            CHECK(traj.sample_times[i] > traj.sample_times[i - 1]);
        for (double v : traj.output_voltage) {
            CHECK(v <= 1.0);
            CHECK(v >= -1.0);
        }
    }
    SUBCASE("switch events alternate states") {
        Drive d{{2e-6, 1.0}};
        auto traj = simulate_transient(p, d, 100, 0.0);
        REQUIRE(traj.switch_events.size() > 10);
        for (std::size_t i = 1; i < traj.switch_events.size(); ++i)
            CHECK(traj.switch_events[i].new_state !=
                  traj.switch_events[i - 1].new_state);
        CHECK(traj.switch_events[0].new_state == DiodeState::On);
    }
    SUBCASE("determinism: identical inputs give bit-identical output") {
        Drive d{{2e-6, 1.0}};
        auto a = simulate_transient(p, d, 100, 0.0);
        auto b = simulate_transient(p, d, 100, 0.0);
        CHECK(a.output_voltage == b.output_voltage);
        CHECK(a.sample_times == b.sample_times);
    }
}

TEST_CASE("closed-form output satisfies the segment ODEs") {
    CircuitParams p;
    auto k = derive_constants(p);
    const int spp = 2000;
    Drive d{{20.0 / p.carrier_frequency, 1.0}};
    auto traj = simulate_transient(p, d, spp, 0.0);
    double dt = 1.0 / (p.carrier_frequency * spp);
    // FD truncation scale: third derivative is carrier-dominated
    double eps_fd = k.omega * (k.omega * dt) * (k.omega * dt) * 1.0;

    std::size_t ev = 0;
    DiodeState state = DiodeState::Off;
    int checked = 0;
    for (std::size_t i = 1; i + 1 < traj.sample_times.size(); ++i) {
        while (ev < traj.switch_events.size() &&
               traj.switch_events[ev].time <= traj.sample_times[i])
            state = traj.switch_events[ev++].new_state;
        if (ev < traj.switch_events.size() &&
            traj.switch_events[ev].time <= traj.sample_times[i + 1])
            continue; // switch inside the stencil
        if (ev > 0 && traj.switch_events[ev - 1].time >= traj.sample_times[i - 1])
            continue;
        double dvdt = (traj.output_voltage[i + 1] -
                       traj.output_voltage[i - 1]) /
                      (2 * dt);
        double vs = std::sin(k.omega * traj.sample_times[i]);
        double v = traj.output_voltage[i];
        double residual =
            state == DiodeState::On
                ? dvdt + k.alpha * v - (vs - p.diode_threshold) / k.t_on
                : dvdt + k.beta * v - vs / k.t_off;
        CHECK(std::abs(residual) <= eps_fd);
        ++checked;
    }
    CHECK(checked > 1000);
}

TEST_CASE("oracle equivalence on a short run") {
    CircuitParams p;
    Drive d{{2e-6, 1.0}};
    const int spp = 400;
    auto cf = simulate_transient(p, d, spp, 0.0);
    double step = 1.0 / (p.carrier_frequency * spp * 4);
    auto rk = simulate_transient_oracle(p, d, step, 0.0, spp);
    REQUIRE(cf.sample_times.size() == rk.sample_times.size());
    double max_dev = 0.0;
    for (std::size_t i = 0; i < cf.sample_times.size(); ++i)
        max_dev = std::max(max_dev, std::abs(cf.output_voltage[i] -
                                             rk.output_voltage[i]));
    CHECK(max_dev <= 1e-6);
    CHECK(cf.switch_events.size() == rk.switch_events.size());
}

TEST_CASE("oracle rejects an insufficient step") {
    CircuitParams p;
    CHECK_THROWS_AS(
        simulate_transient_oracle(p, {{1e-6, 1.0}}, 1.0 / p.carrier_frequency / 100, 0.0),
        std::invalid_argument);
}

TEST_CASE("oracle zero drive is identically zero") {
    CircuitParams p;
    auto rk = simulate_transient_oracle(
        p, {{1e-6, 0.0}}, 1.0 / (p.carrier_frequency * 400), 0.0);
    for (double v : rk.output_voltage) CHECK(v == 0.0);
}

TEST_CASE("bisection refinement localizes the first turn-on instant") {
    CircuitParams p;
    auto k = derive_constants(p);
    Drive d{{0.5e-6, 1.0}};
    auto refined = simulate_transient(p, d, 100, 0.0, SwitchRefine::Bisect);
    REQUIRE(!refined.switch_events.empty());
    // exact crossing of (vs - 0) * Roff/(Rs+Roff) = Von from an empty cap
    double ratio = p.off_resistance / (p.source_resistance + p.off_resistance);
    double t_exact = std::asin(p.diode_threshold / ratio) / k.omega;
    double dt = 1.0 / (p.carrier_frequency * 100);
    CHECK(std::abs(refined.switch_events[0].time - t_exact) < dt * 1e-3);

    auto coarse = simulate_transient(p, d, 100, 0.0, SwitchRefine::GridOnly);
    CHECK(std::abs(coarse.switch_events[0].time - t_exact) <= dt);
}

TEST_CASE("steady state detection") {
    CircuitParams p;
    SUBCASE("reference point settles like the transient analysis predicts") {
        auto ss = steady_state_output(p, 1.0, 1e-3);
        CHECK(ss.settle_time > 10e-6);
        CHECK(ss.settle_time < 18e-6);
        CHECK(ss.level > 0.4);
        CHECK(ss.level < 0.7);
    }
    SUBCASE("open circuit plateaus near the drive minus the threshold") {
        CircuitParams open = p;
        open.load_resistance = CircuitParams::kOpenLoad;
        auto ss = steady_state_output(open, 1.0, 1e-3);
        CHECK(ss.level > 0.73);
        CHECK(ss.level < 0.76);
    }
    SUBCASE("strictly increasing in amplitude") {
        double prev = 0.0;
        for (double a : {0.5, 0.75, 1.0}) {
            double level = steady_state_output(p, a, 1e-3).level;
            CHECK(level > prev);
            prev = level;
        }
    }
    SUBCASE("error paths") {
        CHECK_THROWS_AS(steady_state_output(p, 0.2, 1e-3), NotConducting);
        CHECK_THROWS_AS(steady_state_output(p, 1.0, 2.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(steady_state_output(p, 1.0, 1e-3, 1e-7),
                        NoConvergence);
    }
}

TEST_CASE("end-of-symbol sampling is continuous across drive boundaries") {
    CircuitParams p;
    auto x = end_of_symbol_samples(p, {1.0, 0.5, 1.0}, 6.25e-6, 100, 0.0);
    REQUIRE(x.size() == 3);
    // same schedule as one trajectory; boundary samples must agree
    Drive d{{6.25e-6, 1.0}, {6.25e-6, 0.5}, {6.25e-6, 1.0}};
    auto traj = simulate_transient(p, d, 100, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        double t_b = 6.25e-6 * static_cast<double>(i + 1);
        double best = 1e9;
        double v_at = 0.0;
        for (std::size_t j = 0; j < traj.sample_times.size(); ++j) {
            double dev = std::abs(traj.sample_times[j] - t_b);
            if (dev < best) {
                best = dev;
                v_at = traj.output_voltage[j];
            }
        }
        CHECK(x[i] == doctest::Approx(v_at).epsilon(1e-12));
    }
}
