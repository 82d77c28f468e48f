#pragma once

#include <cstdint>
#include <vector>

#include "swipt/circuit.hpp"

namespace swipt {

/// Biased M-ASK amplitude set. Amplitudes are evenly spaced above
/// `min_amplitude`; bit labels are Gray coded so adjacent amplitudes
/// differ in one bit.
struct Constellation {
    int order = 0;                  // M, power of two
    std::vector<double> amplitudes; // strictly increasing [V]
    double min_amplitude = 0.0;     // A_min [V]
    std::vector<uint32_t> bit_map;  // Gray label per amplitude index
    int bits_per_symbol = 0;        // log2(M)
};

struct LinkConfig {
    double symbol_period = 0.0; // Ts [s]
    int block_length = 0;       // L, symbols between capacitor resets
    int window = 0;             // K, MLSD window (K divides L)
    double eb_n0 = 0.0;         // linear ratio
    uint64_t seed = 0;
};

struct SampledSymbols {
    std::vector<double> noiseless; // x_i [V]
    std::vector<double> noisy;     // y_i [V]
    double sigma = 0.0;            // [V]
};

// (1/(2M)) * sum A_m^2, the average per-symbol power of equiprobable
// sinusoidal symbols.
double average_symbol_power(const Constellation& c);

/// Solves for the positive amplitude spacing that meets
/// `target_avg_power`, keeping `min_amplitude` fixed. Throws
/// std::invalid_argument when no positive spacing exists.
Constellation build_constellation(int order, double min_amplitude,
                                  double target_avg_power);

// Noise standard deviation for a given Eb/N0 (linear):
// sigma = sqrt(P_av / (2 * bits_per_symbol * eb_n0)).
double noise_sigma(double avg_power, double eb_n0, int bits_per_symbol);

// Maps a bit stream (values 0/1, length divisible by bits_per_symbol,
// MSB first within a symbol) onto constellation amplitudes.
std::vector<double> modulate(const std::vector<uint8_t>& bits,
                             const Constellation& c);

// Gray label of constellation index, and its inverse.
uint32_t gray_label(uint32_t index);
std::vector<uint8_t> symbols_to_bits(const std::vector<int>& symbols,
                                     const Constellation& c);

/// Runs one block of per-symbol amplitudes through the rectifier from
/// `initial_voltage` and returns the end-of-symbol outputs x_i.
std::vector<double> transmit_block(const std::vector<double>& amplitudes,
                                   double symbol_period,
                                   const CircuitParams& params,
                                   int samples_per_period = 100,
                                   double initial_voltage = 0.0);

// y_i = x_i + n_i with i.i.d. N(0, sigma^2) noise from a deterministic
// seeded stream.
std::vector<double> add_noise(const std::vector<double>& x, double sigma,
                              uint64_t seed);

// Stream-splitting helper: derives an independent sub-seed for
// (stream, index) pairs, used to keep parallel Monte Carlo blocks
// reproducible regardless of scheduling.
uint64_t derive_seed(uint64_t base, uint64_t stream, uint64_t index);

} // namespace swipt
