#include "swipt/detection.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace swipt {

namespace {

std::vector<int> decode_sequence(std::size_t id, int order, int window) {
    std::vector<int> symbols(window);
    for (int i = window - 1; i >= 0; --i) {
        symbols[i] = static_cast<int>(id % order);
        id /= order;
    }
    return symbols;
}

std::size_t sequence_count(int order, int window, std::size_t budget) {
    std::size_t n = 1;
    for (int i = 0; i < window; ++i) {
        if (n > budget / static_cast<std::size_t>(order))
            throw BudgetExceeded("M^K exceeds the enumeration budget");
        n *= static_cast<std::size_t>(order);
    }
    if (n > budget) throw BudgetExceeded("M^K exceeds the enumeration budget");
    return n;
}

} // namespace

SteadyStateSet compute_steady_states(const CircuitParams& params,
                                     const Constellation& c, double tol) {
    SteadyStateSet out;
    out.levels.reserve(c.amplitudes.size());
    for (double a : c.amplitudes)
        out.levels.push_back(steady_state_output(params, a, tol).level);
    return out;
}

OutputRanges ranges_from_table(const SequenceOutputTable& table) {
    OutputRanges out;
    out.ranges.assign(table.order, {1e300, -1e300});
    const int window = table.window;
    for (std::size_t id = 0; id < table.outputs.size(); ++id) {
        std::size_t rem = id;
        for (int i = window - 1; i >= 0; --i) {
            int sym = static_cast<int>(rem % table.order);
            rem /= table.order;
            double v = table.outputs[id][i];
            auto& r = out.ranges[sym];
            r.min = std::min(r.min, v);
            r.max = std::max(r.max, v);
        }
    }
    for (int kk = 0; kk + 1 < table.order; ++kk) {
        if (out.ranges[kk].max >= out.ranges[kk + 1].min) out.overlap = true;
        out.thresholds.push_back(
            0.5 * (out.ranges[kk].max + out.ranges[kk + 1].min));
    }
    out.bounded_references.resize(table.order);
    for (int kk = 0; kk < table.order; ++kk) {
        if (kk == 0)
            out.bounded_references[kk] = out.ranges[kk].max;
        else if (kk == table.order - 1)
            out.bounded_references[kk] = out.ranges[kk].min;
        else
            out.bounded_references[kk] =
                0.5 * (out.ranges[kk].min + out.ranges[kk].max);
    }
    return out;
}

OutputRanges compute_output_ranges(const CircuitParams& params,
                                   const Constellation& c,
                                   double symbol_period, int block_length,
                                   int samples_per_period) {
    auto table = build_sequence_table(params, c, symbol_period, block_length,
                                      0.0, samples_per_period,
                                      std::size_t{1} << 24);
    return ranges_from_table(table);
}

DetectionResult ml_detect(const std::vector<double>& y,
                          const std::vector<double>& references,
                          const Constellation& c) {
    for (std::size_t i = 1; i < references.size(); ++i)
        if (!(references[i] > references[i - 1]))
            throw std::invalid_argument(
                "references must be strictly increasing");
    DetectionResult out;
    out.symbols.reserve(y.size());
    for (double yi : y) {
        int best = 0;
        double best_dist = std::abs(yi - references[0]);
        for (std::size_t j = 1; j < references.size(); ++j) {
            double d = std::abs(yi - references[j]);
            if (d < best_dist) {
                best_dist = d;
                best = static_cast<int>(j);
            }
        }
        out.symbols.push_back(best);
    }
    out.bits = symbols_to_bits(out.symbols, c);
    return out;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double theoretical_pe_bask(double a0, double a1, double sigma) {
    if (!(a1 >= a0)) throw std::invalid_argument("requires a1 >= a0");
    if (!(sigma > 0.0)) throw std::invalid_argument("requires sigma > 0");
    return q_function((a1 - a0) / (2.0 * sigma));
}

SequenceOutputTable build_sequence_table(const CircuitParams& params,
                                         const Constellation& c,
                                         double symbol_period, int window,
                                         double initial_voltage,
                                         int samples_per_period,
                                         std::size_t budget) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    const std::size_t n = sequence_count(c.order, window, budget);

    SequenceOutputTable table;
    table.order = c.order;
    table.window = window;
    table.initial_voltage = initial_voltage;
    table.outputs.reserve(n);
    std::vector<double> amps(window);
    for (std::size_t id = 0; id < n; ++id) {
        auto symbols = decode_sequence(id, c.order, window);
        for (int i = 0; i < window; ++i) amps[i] = c.amplitudes[symbols[i]];
        table.outputs.push_back(transmit_block(
            amps, symbol_period, params, samples_per_period, initial_voltage));
    }
    return table;
}

DetectionResult mlsd_detect(const std::vector<double>& y,
                            const SequenceOutputTable& table,
                            const Constellation& c) {
    if (y.size() != static_cast<std::size_t>(table.window))
        throw std::invalid_argument("sample count must equal the table window");
    std::size_t best = 0;
    double best_dist = 1e300;
    for (std::size_t id = 0; id < table.outputs.size(); ++id) {
        const auto& x = table.outputs[id];
        double d = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            double e = x[i] - y[i];
            d += e * e;
        }
        if (d < best_dist) {
            best_dist = d;
            best = id;
        }
    }
    DetectionResult out;
    out.symbols = decode_sequence(best, table.order, table.window);
    out.bits = symbols_to_bits(out.symbols, c);
    return out;
}

struct TableCache::Impl {
    std::mutex mutex;
    std::map<std::string, std::shared_future<std::shared_ptr<const SequenceOutputTable>>>
        entries;
};

TableCache::TableCache() : impl_(std::make_unique<Impl>()) {}
TableCache::~TableCache() = default;

std::shared_ptr<const SequenceOutputTable> TableCache::get_or_build(
    const CircuitParams& params, const Constellation& c, double symbol_period,
    int window, double initial_voltage, int samples_per_period,
    std::size_t budget) {
    char key[512];
    std::snprintf(key, sizeof(key),
                  "%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%d|%.17g|%.17g|%d|%lld|%d",
                  params.capacitance, params.source_resistance,
                  params.on_resistance, params.off_resistance,
                  params.load_resistance, params.diode_threshold,
                  params.carrier_frequency, c.order, c.min_amplitude,
                  symbol_period, window,
                  static_cast<long long>(std::llround(initial_voltage * 1e6)),
                  samples_per_period);

    std::shared_future<std::shared_ptr<const SequenceOutputTable>> future;
    std::promise<std::shared_ptr<const SequenceOutputTable>> promise;
    bool builder = false;
    {
        std::lock_guard<std::mutex> lock(impl_->mutex);
        auto it = impl_->entries.find(key);
        if (it == impl_->entries.end()) {
            builder = true;
            future = promise.get_future().share();
            impl_->entries.emplace(key, future);
        } else {
            future = it->second;
        }
    }
    if (builder) {
        try {
            promise.set_value(std::make_shared<const SequenceOutputTable>(
                build_sequence_table(params, c, symbol_period, window,
                                     initial_voltage, samples_per_period,
                                     budget)));
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    return future.get();
}

DetectionResult detect_block(const std::vector<double>& y,
                             const CircuitParams& params,
                             const Constellation& c, double symbol_period,
                             int block_length, int window, TableCache& cache,
                             int samples_per_period, std::size_t budget) {
    if (window < 1 || block_length < 1 || block_length % window != 0)
        throw std::invalid_argument("window must divide block_length");
    if (y.size() != static_cast<std::size_t>(block_length))
        throw std::invalid_argument("sample count must equal block_length");

    DetectionResult out;
    double v0 = 0.0;
    for (int w = 0; w < block_length / window; ++w) {
        auto table = cache.get_or_build(params, c, symbol_period, window, v0,
                                        samples_per_period, budget);
        std::vector<double> slice(y.begin() + w * window,
                                  y.begin() + (w + 1) * window);
        auto decided = mlsd_detect(slice, *table, c);
        std::size_t id = 0;
        for (int s : decided.symbols)
            id = id * static_cast<std::size_t>(c.order) +
                 static_cast<std::size_t>(s);
        v0 = table->outputs[id].back();
        out.symbols.insert(out.symbols.end(), decided.symbols.begin(),
                           decided.symbols.end());
    }
    out.bits = symbols_to_bits(out.symbols, c);
    return out;
}

} // namespace swipt
