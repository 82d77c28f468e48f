#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "swipt/experiments.hpp"

namespace swipt::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadSpec {
    double ohms;
    bool open; // configured with the "open" keyword
};

/// Everything a run needs, with defaults matching the reference circuit
/// and experiment setup. Overridable from a config file plus command
/// line flags.
struct RunConfig {
    CircuitParams circuit;

    struct {
        int order = 2;
        double min_amplitude = 0.5;
        double avg_power = 5.0 / 16.0;
    } modulation;

    struct {
        std::vector<double> symbol_periods = {6.25e-6, 12.5e-6, 18.75e-6};
        int block_length = 6;
        int window = 6;
        std::vector<double> ebn0_db = {0, 1, 2,  3,  4,  5,  6, 7,
                                       8, 9, 10, 11, 12, 13, 14};
        long long target_bits = 100000;
        uint64_t seed = 1;
        int samples_per_period = 100;
    } link;

    struct {
        double duration = 20e-6;
        double amplitude = 1.0;
        std::vector<LoadSpec> loads = {{1e3, false},
                                       {CircuitParams::kOpenLoad, true}};
        bool with_oracle = false;
    } transient;

    struct {
        std::vector<Detector> detectors = {Detector::MlSteady, Detector::Mlsd};
    } ber;

    struct {
        long long num_blocks = 1000;
    } eh;

    std::string out_dir = "out";
    bool plots = false;
    int workers = 0; // 0 = hardware concurrency

    Constellation constellation() const;
    void validate() const; // throws ConfigError
};

// Parses the key/value config file into `cfg`, starting from whatever
// defaults it already holds. Unknown sections or keys are hard errors
// anchored to the offending line.
void load_config_file(const std::string& path, RunConfig& cfg);

} // namespace swipt::cli
