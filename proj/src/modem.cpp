#include "swipt/modem.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace swipt {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

double average_symbol_power(const Constellation& c) {
    double acc = 0.0;
    for (double a : c.amplitudes) acc += a * a;
    return acc / (2.0 * static_cast<double>(c.amplitudes.size()));
}

uint32_t gray_label(uint32_t index) { return index ^ (index >> 1); }

Constellation build_constellation(int order, double min_amplitude,
                                  double target_avg_power) {
    if (order < 2 || !is_power_of_two(order))
        throw std::invalid_argument("order must be a power of two, >= 2");
    if (!(min_amplitude > 0.0))
        throw std::invalid_argument("min_amplitude must be > 0");
    if (!(target_avg_power > 0.0))
        throw std::invalid_argument("target power must be > 0");

    // (1/(2M)) * sum_m (A_min + m d)^2 = P resolves to a quadratic in d.
    const double m1 = static_cast<double>(order - 1) * order / 2.0;
    double m2 = 0.0;
    for (int m = 0; m < order; ++m) m2 += static_cast<double>(m) * m;
    const double a = m2;
    const double b = 2.0 * min_amplitude * m1;
    const double cc = order * min_amplitude * min_amplitude -
                      2.0 * order * target_avg_power;
    const double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0)
        throw std::invalid_argument(
            "infeasible constellation: target power below minimum");
    const double d = (-b + std::sqrt(disc)) / (2.0 * a);
    if (!(d > 0.0))
        throw std::invalid_argument(
            "infeasible constellation: spacing is not positive");

    Constellation c;
    c.order = order;
    c.min_amplitude = min_amplitude;
    c.bits_per_symbol = 0;
    for (int n = order; n > 1; n >>= 1) ++c.bits_per_symbol;
    for (int m = 0; m < order; ++m) {
        c.amplitudes.push_back(min_amplitude + m * d);
        c.bit_map.push_back(gray_label(static_cast<uint32_t>(m)));
    }
    return c;
}

double noise_sigma(double avg_power, double eb_n0, int bits_per_symbol) {
    if (!(avg_power > 0.0) || !(eb_n0 > 0.0) || bits_per_symbol < 1)
        throw std::invalid_argument("noise_sigma: inputs must be positive");
    return std::sqrt(avg_power / (2.0 * bits_per_symbol * eb_n0));
}

std::vector<double> modulate(const std::vector<uint8_t>& bits,
                             const Constellation& c) {
    if (bits.size() % static_cast<std::size_t>(c.bits_per_symbol) != 0)
        throw std::invalid_argument(
            "bit count is not a multiple of bits_per_symbol");

    // invert the Gray map once
    std::vector<int> index_of_label(c.order);
    for (int m = 0; m < c.order; ++m) index_of_label[c.bit_map[m]] = m;

    std::vector<double> out;
    out.reserve(bits.size() / c.bits_per_symbol);
    for (std::size_t i = 0; i < bits.size(); i += c.bits_per_symbol) {
        uint32_t label = 0;
        for (int j = 0; j < c.bits_per_symbol; ++j) {
            if (bits[i + j] > 1)
                throw std::invalid_argument("bits must be 0 or 1");
            label = (label << 1) | bits[i + j];
        }
        out.push_back(c.amplitudes[index_of_label[label]]);
    }
    return out;
}

std::vector<uint8_t> symbols_to_bits(const std::vector<int>& symbols,
                                     const Constellation& c) {
    std::vector<uint8_t> bits;
    bits.reserve(symbols.size() * c.bits_per_symbol);
    for (int s : symbols) {
        uint32_t label = c.bit_map[s];
        for (int j = c.bits_per_symbol - 1; j >= 0; --j)
            bits.push_back(static_cast<uint8_t>((label >> j) & 1u));
    }
    return bits;
}

std::vector<double> transmit_block(const std::vector<double>& amplitudes,
                                   double symbol_period,
                                   const CircuitParams& params,
                                   int samples_per_period,
                                   double initial_voltage) {
    for (double a : amplitudes)
        if (!(a > params.diode_threshold))
            throw NotConducting(
                "symbol amplitude does not exceed diode threshold");
    return end_of_symbol_samples(params, amplitudes, symbol_period,
                                 samples_per_period, initial_voltage);
}

std::vector<double> add_noise(const std::vector<double>& x, double sigma,
                              uint64_t seed) {
    if (!(sigma >= 0.0))
        throw std::invalid_argument("sigma must be >= 0");
    if (sigma == 0.0) return x;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    std::vector<double> y;
    y.reserve(x.size());
    for (double xi : x) y.push_back(xi + gauss(rng));
    return y;
}

uint64_t derive_seed(uint64_t base, uint64_t stream, uint64_t index) {
    return splitmix64(splitmix64(base ^ (stream * 0xd1342543de82ef95ull)) ^
                      index);
}

} // namespace swipt
