#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "swipt/detection.hpp"

namespace swipt {

enum class Detector { MlSteady, MlBounded, Mlsd };

const char* detector_name(Detector d);

struct BerResult {
    double eb_n0_db = 0.0;
    Detector detector = Detector::MlSteady;
    std::string modulation;
    double symbol_period = 0.0;
    int window = 0;
    long long bit_errors = 0;
    long long bits_simulated = 0;
    double ber = 0.0;
    double ci95_halfwidth = 0.0;
};

struct EhResult {
    double symbol_period = 0.0;
    int block_length = 0;
    double avg_sequence_power = 0.0; // P_L [W]
    double std_error = 0.0;          // [W]
    long long sequences_averaged = 0;
};

struct BerConfig {
    CircuitParams params;
    Constellation constellation;
    Detector detector = Detector::MlSteady;
    double symbol_period = 0.0;
    int block_length = 6;
    int window = 6; // MLSD window; ignored by the ML detectors
    std::vector<double> eb_n0_grid_db;
    long long target_bits = 1000000;
    uint64_t seed = 1;
    int samples_per_period = 100;
    double steady_tol = 1e-3;
    std::size_t budget = 65536;
};

// Instantaneous power dissipated in the load.
double instantaneous_load_power(double vc, double rl);

// Mean load power over the end-of-symbol samples of one block.
double average_sequence_power(const std::vector<double>& block_samples,
                              double rl);

/// Monte Carlo BER over the Eb/N0 grid. Noiseless block outputs come
/// from one cached M^L candidate table, so only noise and detection are
/// redone per grid point. Deterministic for a given config and seed.
std::vector<BerResult> ber_curve(const BerConfig& cfg, TableCache& cache);

/// Theoretical bit error probability per grid point from a reference
/// amplitude set (steady states for the exact curve, bounded-range
/// representatives for the upper bound).
std::vector<double> theoretical_curve(const std::vector<double>& references,
                                      const std::vector<double>& eb_n0_grid_db,
                                      double avg_power, int bits_per_symbol);

/// Average sequence power over random equiprobable blocks for each
/// symbol period, simulated noiselessly from an empty capacitor.
std::vector<EhResult> eh_sweep(const CircuitParams& params,
                               const Constellation& c,
                               const std::vector<double>& symbol_periods,
                               int block_length, long long num_blocks,
                               uint64_t seed, TableCache& cache,
                               int samples_per_period = 100);

} // namespace swipt
