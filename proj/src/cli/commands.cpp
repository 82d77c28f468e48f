#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "csv.hpp"
#include "svg.hpp"

namespace swipt::cli {

namespace fs = std::filesystem;

namespace {

void run_parallel(std::vector<std::function<void()>> tasks, int workers) {
    if (workers <= 0)
        workers = static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(tasks.size())));
    if (workers == 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                try {
                    tasks[i]();
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string load_tag(const LoadSpec& load) {
    if (load.open) return "open";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", load.ohms);
    return buf;
}

std::string ts_tag(double ts) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", ts * 1e6);
    return buf;
}

// diode state per sample, reconstructed from the switch-event log
std::vector<int> states_along(const Trajectory& traj) {
    std::vector<int> states(traj.sample_times.size());
    std::size_t ev = 0;
    int state = 0;
    for (std::size_t i = 0; i < traj.sample_times.size(); ++i) {
        while (ev < traj.switch_events.size() &&
               traj.switch_events[ev].time <= traj.sample_times[i]) {
            state = traj.switch_events[ev].new_state == DiodeState::On ? 1 : 0;
            ++ev;
        }
        states[i] = state;
    }
    return states;
}

PlotSeries decimated(const std::string& name, const std::vector<double>& x,
                     const std::vector<double>& y, double x_scale) {
    PlotSeries s{name, {}, {}};
    std::size_t stride = std::max<std::size_t>(1, x.size() / 4000);
    for (std::size_t i = 0; i < x.size(); i += stride) {
        s.x.push_back(x[i] * x_scale);
        s.y.push_back(y[i]);
    }
    return s;
}

} // namespace

int cmd_transient(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const Drive drive{{cfg.transient.duration, cfg.transient.amplitude}};
    std::vector<PlotSeries> plot;
    std::mutex plot_mutex;

    std::vector<std::function<void()>> tasks;
    for (const auto& load : cfg.transient.loads) {
        tasks.emplace_back([&, load] {
            CircuitParams params = cfg.circuit;
            params.load_resistance = load.ohms;
            auto traj = simulate_transient(params, drive,
                                           cfg.link.samples_per_period, 0.0);
            auto states = states_along(traj);

            Trajectory oracle;
            if (cfg.transient.with_oracle) {
                double step = 1.0 / (params.carrier_frequency *
                                     cfg.link.samples_per_period * 4.0);
                oracle = simulate_transient_oracle(params, drive, step, 0.0,
                                                   cfg.link.samples_per_period);
            }

            std::vector<std::string> cols = {"time_s", "v_c_V", "diode_state"};
            if (cfg.transient.with_oracle) cols.push_back("v_c_oracle_V");
            CsvWriter csv(fs::path(cfg.out_dir) /
                              ("transient_rl_" + load_tag(load) + ".csv"),
                          cols);
            for (std::size_t i = 0; i < traj.sample_times.size(); ++i) {
                csv.cell(traj.sample_times[i]);
                csv.cell(traj.output_voltage[i]);
                csv.cell(states[i]);
                if (cfg.transient.with_oracle) {
                    if (i < oracle.output_voltage.size())
                        csv.cell(oracle.output_voltage[i]);
                    else
                        csv.empty_cell();
                }
                csv.end_row();
            }
            csv.close();

            if (cfg.plots) {
                std::lock_guard<std::mutex> lock(plot_mutex);
                plot.push_back(decimated("Rl = " + load_tag(load) + " ohm",
                                         traj.sample_times,
                                         traj.output_voltage, 1e6));
            }
        });
    }
    run_parallel(std::move(tasks), cfg.workers);

    if (cfg.plots) {
        std::sort(plot.begin(), plot.end(),
                  [](const PlotSeries& a, const PlotSeries& b) {
                      return a.name < b.name;
                  });
        write_line_chart((fs::path(cfg.out_dir) / "transient.svg").string(),
                         "Rectifier output voltage", "time [us]", "V_C [V]",
                         plot, false);
    }
    return 0;
}

int cmd_ber(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const Constellation c = cfg.constellation();
    TableCache cache;
    std::vector<PlotSeries> plot;
    std::mutex plot_mutex;

    std::vector<std::function<void()>> tasks;
    for (Detector det : cfg.ber.detectors) {
        for (double ts : cfg.link.symbol_periods) {
            tasks.emplace_back([&, det, ts] {
                BerConfig bc;
                bc.params = cfg.circuit;
                bc.constellation = c;
                bc.detector = det;
                bc.symbol_period = ts;
                bc.block_length = cfg.link.block_length;
                bc.window = cfg.link.window;
                bc.eb_n0_grid_db = cfg.link.ebn0_db;
                bc.target_bits = cfg.link.target_bits;
                bc.seed = cfg.link.seed;
                bc.samples_per_period = cfg.link.samples_per_period;
                auto results = ber_curve(bc, cache);

                std::vector<double> theory;
                bool upper_bound = false;
                if (det == Detector::MlSteady) {
                    auto refs = compute_steady_states(cfg.circuit, c, 1e-3);
                    theory = theoretical_curve(refs.levels, cfg.link.ebn0_db,
                                               average_symbol_power(c),
                                               c.bits_per_symbol);
                } else if (det == Detector::MlBounded) {
                    auto table = cache.get_or_build(
                        cfg.circuit, c, ts, cfg.link.block_length, 0.0,
                        cfg.link.samples_per_period);
                    auto ranges = ranges_from_table(*table);
                    theory = theoretical_curve(
                        ranges.bounded_references, cfg.link.ebn0_db,
                        average_symbol_power(c), c.bits_per_symbol);
                    upper_bound = true;
                }

                std::string name = std::string(detector_name(det)) + "_ts" +
                                   ts_tag(ts) + "us";
                if (det == Detector::Mlsd)
                    name += "_K" + std::to_string(cfg.link.window);
                CsvWriter csv(fs::path(cfg.out_dir) / ("ber_" + name + ".csv"),
                              {"eb_n0_db", "ber", "ci95_halfwidth",
                               "bit_errors", "bits_simulated", "theory_pe",
                               "theory_is_upper_bound"});
                PlotSeries series{name, {}, {}};
                for (std::size_t i = 0; i < results.size(); ++i) {
                    const auto& r = results[i];
                    csv.cell(r.eb_n0_db);
                    csv.cell(r.ber);
                    csv.cell(r.ci95_halfwidth);
                    csv.cell(r.bit_errors);
                    csv.cell(r.bits_simulated);
                    if (theory.empty()) {
                        csv.empty_cell();
                        csv.empty_cell();
                    } else {
                        csv.cell(theory[i]);
                        csv.cell(upper_bound ? 1 : 0);
                    }
                    csv.end_row();
                    series.x.push_back(r.eb_n0_db);
                    series.y.push_back(r.ber);
                }
                csv.close();
                if (cfg.plots) {
                    std::lock_guard<std::mutex> lock(plot_mutex);
                    plot.push_back(std::move(series));
                }
            });
        }
    }
    run_parallel(std::move(tasks), cfg.workers);

    if (cfg.plots && !plot.empty()) {
        std::sort(plot.begin(), plot.end(),
                  [](const PlotSeries& a, const PlotSeries& b) {
                      return a.name < b.name;
                  });
        write_line_chart((fs::path(cfg.out_dir) / "ber.svg").string(),
                         "Bit error rate", "Eb/N0 [dB]", "BER", plot, true);
    }
    return 0;
}

int cmd_eh(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const Constellation c = cfg.constellation();
    TableCache cache;
    auto results =
        eh_sweep(cfg.circuit, c, cfg.link.symbol_periods,
                 cfg.link.block_length, cfg.eh.num_blocks, cfg.link.seed,
                 cache, cfg.link.samples_per_period);

    CsvWriter csv(fs::path(cfg.out_dir) / "eh.csv",
                  {"symbol_period_s", "block_length", "avg_sequence_power_W",
                   "std_error_W", "sequences_averaged"});
    PlotSeries series{"P_L", {}, {}};
    for (const auto& r : results) {
        csv.cell(r.symbol_period);
        csv.cell(r.block_length);
        csv.cell(r.avg_sequence_power);
        csv.cell(r.std_error);
        csv.cell(r.sequences_averaged);
        csv.end_row();
        series.x.push_back(r.symbol_period * 1e6);
        series.y.push_back(r.avg_sequence_power);
    }
    csv.close();
    if (cfg.plots)
        write_line_chart((fs::path(cfg.out_dir) / "eh.svg").string(),
                         "Average sequence power", "symbol period [us]",
                         "P_L [W]", {series}, false);
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    struct Case {
        std::string name;
        double load;
        double amplitude;
    };
    std::vector<Case> cases = {
        {"load", cfg.circuit.load_resistance, cfg.transient.amplitude},
        {"open-circuit", CircuitParams::kOpenLoad, cfg.transient.amplitude},
        {"zero-drive", cfg.circuit.load_resistance, 0.0},
    };

    const int spp = std::max(200, cfg.link.samples_per_period);
    bool ok = true;
    for (const auto& cs : cases) {
        CircuitParams params = cfg.circuit;
        params.load_resistance = cs.load;
        Drive drive{{cfg.transient.duration, cs.amplitude}};
        auto closed = simulate_transient(params, drive, spp, 0.0);
        double step = 1.0 / (params.carrier_frequency * spp * 4.0);
        auto oracle = simulate_transient_oracle(params, drive, step, 0.0, spp);
        std::size_t n =
            std::min(closed.sample_times.size(), oracle.sample_times.size());
        double max_dev = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            max_dev = std::max(max_dev, std::abs(closed.output_voltage[i] -
                                                 oracle.output_voltage[i]));
        double limit = cs.amplitude > 0.0 ? 1e-6 * cs.amplitude : 1e-12;
        bool pass = max_dev <= limit;
        ok = ok && pass;
        std::printf("[%s] %-12s max |dV_C| = %.3e V (limit %.1e V)\n",
                    pass ? "PASS" : "FAIL", cs.name.c_str(), max_dev, limit);
    }
    std::printf("verify: %s\n", ok ? "PASS" : "FAIL");
    return ok ? 0 : 3;
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Half-wave rectifier SWIPT link simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int64_t seed = -1;
    int workers = -1;
    bool plots = false;
    app.add_option("--config", config_path, "configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--workers", workers, "worker thread count");
    app.add_flag("--plots", plots, "emit SVG plots next to the CSVs");

    auto* sub_transient =
        app.add_subcommand("transient", "transient output voltage CSV");
    auto* sub_ber = app.add_subcommand("ber", "Monte Carlo BER curves");
    auto* sub_eh = app.add_subcommand("eh", "average sequence power sweep");
    auto* sub_verify =
        app.add_subcommand("verify", "closed form vs RK4 oracle report");
    for (auto* sub : {sub_transient, sub_ber, sub_eh, sub_verify})
        sub->fallthrough();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) load_config_file(config_path, cfg);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed >= 0) cfg.link.seed = static_cast<uint64_t>(seed);
        if (workers >= 0) cfg.workers = workers;
        if (plots) cfg.plots = true;
        cfg.validate();

        if (sub_transient->parsed()) return cmd_transient(cfg);
        if (sub_ber->parsed()) return cmd_ber(cfg);
        if (sub_eh->parsed()) return cmd_eh(cfg);
        if (sub_verify->parsed()) return cmd_verify(cfg);
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace swipt::cli
