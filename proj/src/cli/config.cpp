#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace swipt::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Context {
    const std::string& path;
    int line;
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(path + ":" + std::to_string(line) + ": " + msg);
    }
};

double parse_double(const Context& ctx, const std::string& v) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) ctx.fail("trailing characters in number '" + v + "'");
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        ctx.fail("expected a number, got '" + v + "'");
    }
}

long long parse_int(const Context& ctx, const std::string& v) {
    double d = parse_double(ctx, v);
    auto n = static_cast<long long>(d);
    if (static_cast<double>(n) != d) ctx.fail("expected an integer, got '" + v + "'");
    return n;
}

bool parse_bool(const Context& ctx, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    ctx.fail("expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// "a:b:c" expands to an inclusive range with step c; otherwise a comma
// list.
std::vector<double> parse_grid(const Context& ctx, const std::string& v) {
    if (v.find(':') != std::string::npos) {
        auto parts = split_list([&] {
            std::string s = v;
            for (auto& ch : s)
                if (ch == ':') ch = ',';
            return s;
        }());
        if (parts.size() != 3) ctx.fail("range must be start:stop:step");
        double a = parse_double(ctx, parts[0]);
        double b = parse_double(ctx, parts[1]);
        double step = parse_double(ctx, parts[2]);
        if (!(step > 0.0)) ctx.fail("range step must be > 0");
        std::vector<double> out;
        for (double x = a; x <= b + 1e-9 * step; x += step) out.push_back(x);
        return out;
    }
    std::vector<double> out;
    for (const auto& item : split_list(v)) out.push_back(parse_double(ctx, item));
    return out;
}

Detector parse_detector(const Context& ctx, const std::string& v) {
    if (v == "ml_steady") return Detector::MlSteady;
    if (v == "ml_bounded") return Detector::MlBounded;
    if (v == "mlsd") return Detector::Mlsd;
    ctx.fail("unknown detector '" + v + "' (ml_steady|ml_bounded|mlsd)");
}

} // namespace

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    std::string section;
    std::string raw;
    Context ctx{path, 0};
    while (std::getline(in, raw)) {
        ++ctx.line;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') ctx.fail("unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "circuit" && section != "modulation" &&
                section != "link" && section != "transient" &&
                section != "ber" && section != "eh" && section != "output")
                ctx.fail("unknown section [" + section + "]");
            continue;
        }

        auto eq = line.find('=');
        if (eq == std::string::npos) ctx.fail("expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (section.empty()) ctx.fail("key '" + key + "' outside any section");

        if (section == "circuit") {
            if (key == "capacitance_F")
                cfg.circuit.capacitance = parse_double(ctx, value);
            else if (key == "source_resistance_ohm")
                cfg.circuit.source_resistance = parse_double(ctx, value);
            else if (key == "on_resistance_ohm")
                cfg.circuit.on_resistance = parse_double(ctx, value);
            else if (key == "off_resistance_ohm")
                cfg.circuit.off_resistance = parse_double(ctx, value);
            else if (key == "load_resistance_ohm")
                cfg.circuit.load_resistance =
                    value == "open" ? CircuitParams::kOpenLoad
                                    : parse_double(ctx, value);
            else if (key == "diode_threshold_V")
                cfg.circuit.diode_threshold = parse_double(ctx, value);
            else if (key == "carrier_frequency_Hz")
                cfg.circuit.carrier_frequency = parse_double(ctx, value);
            else
                ctx.fail("unknown key '" + key + "' in [circuit]");
        } else if (section == "modulation") {
            if (key == "order")
                cfg.modulation.order = static_cast<int>(parse_int(ctx, value));
            else if (key == "min_amplitude_V")
                cfg.modulation.min_amplitude = parse_double(ctx, value);
            else if (key == "avg_power")
                cfg.modulation.avg_power = parse_double(ctx, value);
            else
                ctx.fail("unknown key '" + key + "' in [modulation]");
        } else if (section == "link") {
            if (key == "symbol_periods_s")
                cfg.link.symbol_periods = parse_grid(ctx, value);
            else if (key == "block_length")
                cfg.link.block_length = static_cast<int>(parse_int(ctx, value));
            else if (key == "window")
                cfg.link.window = static_cast<int>(parse_int(ctx, value));
            else if (key == "ebn0_db")
                cfg.link.ebn0_db = parse_grid(ctx, value);
            else if (key == "target_bits")
                cfg.link.target_bits = parse_int(ctx, value);
            else if (key == "seed")
                cfg.link.seed = static_cast<uint64_t>(parse_int(ctx, value));
            else if (key == "samples_per_period")
                cfg.link.samples_per_period =
                    static_cast<int>(parse_int(ctx, value));
            else
                ctx.fail("unknown key '" + key + "' in [link]");
        } else if (section == "transient") {
            if (key == "duration_s")
                cfg.transient.duration = parse_double(ctx, value);
            else if (key == "amplitude_V")
                cfg.transient.amplitude = parse_double(ctx, value);
            else if (key == "loads_ohm") {
                cfg.transient.loads.clear();
                for (const auto& item : split_list(value)) {
                    if (item == "open")
                        cfg.transient.loads.push_back(
                            {CircuitParams::kOpenLoad, true});
                    else
                        cfg.transient.loads.push_back(
                            {parse_double(ctx, item), false});
                }
            } else if (key == "with_oracle")
                cfg.transient.with_oracle = parse_bool(ctx, value);
            else
                ctx.fail("unknown key '" + key + "' in [transient]");
        } else if (section == "ber") {
            if (key == "detectors") {
                cfg.ber.detectors.clear();
                for (const auto& item : split_list(value))
                    cfg.ber.detectors.push_back(parse_detector(ctx, item));
            } else
                ctx.fail("unknown key '" + key + "' in [ber]");
        } else if (section == "eh") {
            if (key == "num_blocks")
                cfg.eh.num_blocks = parse_int(ctx, value);
            else
                ctx.fail("unknown key '" + key + "' in [eh]");
        } else if (section == "output") {
            if (key == "directory")
                cfg.out_dir = value;
            else if (key == "plots")
                cfg.plots = parse_bool(ctx, value);
            else
                ctx.fail("unknown key '" + key + "' in [output]");
        }
    }
}

Constellation RunConfig::constellation() const {
    return build_constellation(modulation.order, modulation.min_amplitude,
                               modulation.avg_power);
}

void RunConfig::validate() const {
    try {
        circuit.validate();
        auto c = constellation();
        if (!(c.min_amplitude > circuit.diode_threshold))
            throw ConfigError(
                "min_amplitude_V must exceed the diode threshold");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    for (double ts : link.symbol_periods)
        if (!(ts > 0.0)) throw ConfigError("symbol periods must be > 0");
    if (link.symbol_periods.empty())
        throw ConfigError("at least one symbol period is required");
    if (link.block_length < 1 || link.window < 1 ||
        link.block_length % link.window != 0)
        throw ConfigError("window must divide block_length");
    if (link.target_bits < 1) throw ConfigError("target_bits must be >= 1");
    if (link.samples_per_period < 2)
        throw ConfigError("samples_per_period must be >= 2");
    if (!(transient.duration > 0.0))
        throw ConfigError("transient duration_s must be > 0");
    if (!(transient.amplitude >= 0.0))
        throw ConfigError("transient amplitude_V must be >= 0");
    for (const auto& l : transient.loads)
        if (!(l.ohms > 0.0)) throw ConfigError("loads must be > 0 ohms");
    if (eh.num_blocks < 1) throw ConfigError("eh num_blocks must be >= 1");
    if (workers < 0) throw ConfigError("workers must be >= 0");
}

} // namespace swipt::cli
