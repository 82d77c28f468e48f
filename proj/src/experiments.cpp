#include "swipt/experiments.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace swipt {

const char* detector_name(Detector d) {
    switch (d) {
        case Detector::MlSteady: return "ml_steady";
        case Detector::MlBounded: return "ml_bounded";
        case Detector::Mlsd: return "mlsd";
    }
    return "?";
}

double instantaneous_load_power(double vc, double rl) {
    if (!(rl > 0.0)) throw std::invalid_argument("rl must be > 0");
    return vc * vc / rl;
}

double average_sequence_power(const std::vector<double>& block_samples,
                              double rl) {
    if (block_samples.empty())
        throw std::invalid_argument("block must not be empty");
    double acc = 0.0;
    for (double v : block_samples) acc += instantaneous_load_power(v, rl);
    return acc / static_cast<double>(block_samples.size());
}

std::vector<BerResult> ber_curve(const BerConfig& cfg, TableCache& cache) {
    const Constellation& c = cfg.constellation;
    const int L = cfg.block_length;
    const int M = c.order;
    const int bits_per_block = L * c.bits_per_symbol;
    if (L < 1) throw std::invalid_argument("block_length must be >= 1");
    if (cfg.detector == Detector::Mlsd &&
        (cfg.window < 1 || L % cfg.window != 0))
        throw std::invalid_argument("window must divide block_length");

    // Noiseless outputs for every candidate block, shared by all grid
    // points and detectors.
    auto table = cache.get_or_build(cfg.params, c, cfg.symbol_period, L, 0.0,
                                    cfg.samples_per_period, cfg.budget);

    std::vector<double> references;
    if (cfg.detector == Detector::MlSteady) {
        references =
            compute_steady_states(cfg.params, c, cfg.steady_tol).levels;
    } else if (cfg.detector == Detector::MlBounded) {
        auto ranges = ranges_from_table(*table);
        if (ranges.overlap)
            throw std::runtime_error(
                "adjacent output ranges overlap; bounded ML is unusable, "
                "use MLSD");
        references = ranges.bounded_references;
    }

    const double avg_power = average_symbol_power(c);
    const long long n_blocks =
        (cfg.target_bits + bits_per_block - 1) / bits_per_block;

    std::vector<BerResult> out;
    out.reserve(cfg.eb_n0_grid_db.size());
    for (std::size_t pt = 0; pt < cfg.eb_n0_grid_db.size(); ++pt) {
        const double db = cfg.eb_n0_grid_db[pt];
        const double sigma = noise_sigma(avg_power, std::pow(10.0, db / 10.0),
                                         c.bits_per_symbol);
        long long errors = 0;

        std::vector<int> tx(L);
        std::vector<double> y(L);
        for (long long b = 0; b < n_blocks; ++b) {
            std::mt19937_64 rng(derive_seed(cfg.seed, pt, b));
            std::uniform_int_distribution<int> sym(0, M - 1);
            std::normal_distribution<double> gauss(0.0, sigma);

            std::size_t id = 0;
            for (int i = 0; i < L; ++i) {
                tx[i] = sym(rng);
                id = id * static_cast<std::size_t>(M) +
                     static_cast<std::size_t>(tx[i]);
            }
            const auto& x = table->outputs[id];
            for (int i = 0; i < L; ++i) y[i] = x[i] + gauss(rng);

            DetectionResult decided;
            if (cfg.detector == Detector::Mlsd)
                decided = detect_block(y, cfg.params, c, cfg.symbol_period, L,
                                       cfg.window, cache,
                                       cfg.samples_per_period, cfg.budget);
            else
                decided = ml_detect(y, references, c);

            for (int i = 0; i < L; ++i)
                errors += std::popcount(c.bit_map[tx[i]] ^
                                        c.bit_map[decided.symbols[i]]);
        }

        BerResult r;
        r.eb_n0_db = db;
        r.detector = cfg.detector;
        r.modulation = std::to_string(M) + "-ASK";
        r.symbol_period = cfg.symbol_period;
        r.window = cfg.detector == Detector::Mlsd ? cfg.window : 1;
        r.bit_errors = errors;
        r.bits_simulated = n_blocks * bits_per_block;
        r.ber = static_cast<double>(errors) /
                static_cast<double>(r.bits_simulated);
        r.ci95_halfwidth = 1.96 * std::sqrt(r.ber * (1.0 - r.ber) /
                                            static_cast<double>(r.bits_simulated));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<double> theoretical_curve(const std::vector<double>& references,
                                      const std::vector<double>& eb_n0_grid_db,
                                      double avg_power, int bits_per_symbol) {
    if (references.size() < 2)
        throw std::invalid_argument("need at least two references");
    double gap = 1e300;
    for (std::size_t i = 1; i < references.size(); ++i) {
        if (!(references[i] > references[i - 1]))
            throw std::invalid_argument(
                "references must be strictly increasing");
        gap = std::min(gap, references[i] - references[i - 1]);
    }
    const auto m = static_cast<double>(references.size());
    std::vector<double> out;
    out.reserve(eb_n0_grid_db.size());
    for (double db : eb_n0_grid_db) {
        double sigma = noise_sigma(avg_power, std::pow(10.0, db / 10.0),
                                   bits_per_symbol);
        // nearest-neighbor symbol errors, one bit each under Gray labels
        double ser = 2.0 * (m - 1.0) / m * q_function(gap / (2.0 * sigma));
        out.push_back(ser / bits_per_symbol);
    }
    return out;
}

std::vector<EhResult> eh_sweep(const CircuitParams& params,
                               const Constellation& c,
                               const std::vector<double>& symbol_periods,
                               int block_length, long long num_blocks,
                               uint64_t seed, TableCache& cache,
                               int samples_per_period) {
    if (num_blocks < 1) throw std::invalid_argument("num_blocks must be >= 1");
    std::vector<EhResult> out;
    out.reserve(symbol_periods.size());
    for (std::size_t ti = 0; ti < symbol_periods.size(); ++ti) {
        auto table = cache.get_or_build(params, c, symbol_periods[ti],
                                        block_length, 0.0, samples_per_period);
        double sum = 0.0, sum_sq = 0.0;
        for (long long b = 0; b < num_blocks; ++b) {
            std::mt19937_64 rng(derive_seed(seed, 0x0e0eull + ti, b));
            std::uniform_int_distribution<int> sym(0, c.order - 1);
            std::size_t id = 0;
            for (int i = 0; i < block_length; ++i)
                id = id * static_cast<std::size_t>(c.order) +
                     static_cast<std::size_t>(sym(rng));
            double p = average_sequence_power(table->outputs[id],
                                              params.load_resistance);
            sum += p;
            sum_sq += p * p;
        }
        EhResult r;
        r.symbol_period = symbol_periods[ti];
        r.block_length = block_length;
        r.sequences_averaged = num_blocks;
        r.avg_sequence_power = sum / static_cast<double>(num_blocks);
        double var = (sum_sq - sum * sum / static_cast<double>(num_blocks)) /
                     std::max<double>(1.0, static_cast<double>(num_blocks - 1));
        r.std_error = std::sqrt(std::max(0.0, var) /
                                static_cast<double>(num_blocks));
        out.push_back(r);
    }
    return out;
}

} // namespace swipt
