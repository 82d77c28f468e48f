#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "swipt/modem.hpp"

namespace swipt {

struct SteadyStateSet {
    std::vector<double> levels; // a_k, strictly increasing [V]
};

struct SymbolRange {
    double min; // r_k^min [V]
    double max; // r_k^max [V]
};

/// Per-symbol extreme end-of-symbol outputs over all admissible
/// predecessor histories, plus midpoint thresholds between adjacent
/// symbols. `overlap` is set when adjacent ranges intersect, in which
/// case bounded ML is unusable and MLSD is required.
struct OutputRanges {
    std::vector<SymbolRange> ranges;
    std::vector<double> thresholds; // size M-1, only valid when !overlap
    bool overlap = false;
    // Nearest-boundary representatives used as bounded-ML references
    // (r_0^max, interior midpoints, r_{M-1}^min).
    std::vector<double> bounded_references;
};

/// Noiseless end-of-symbol outputs for every length-K symbol sequence,
/// all propagated from `initial_voltage`. Sequence id encodes symbols
/// most-significant first: id = sum_i sym_i * M^(K-1-i), so ascending id
/// order is lexicographic order.
struct SequenceOutputTable {
    int order = 0;
    int window = 0;
    double initial_voltage = 0.0;
    std::vector<std::vector<double>> outputs; // M^K entries of length K
};

struct DetectionResult {
    std::vector<int> symbols;
    std::vector<uint8_t> bits;
};

SteadyStateSet compute_steady_states(const CircuitParams& params,
                                     const Constellation& c, double tol);

OutputRanges compute_output_ranges(const CircuitParams& params,
                                   const Constellation& c,
                                   double symbol_period, int block_length,
                                   int samples_per_period = 100);

// Same extraction, reusing an already built full-block table.
OutputRanges ranges_from_table(const SequenceOutputTable& table);

// Per-sample nearest-reference decision; ties break toward the lower
// index. References must be strictly increasing.
DetectionResult ml_detect(const std::vector<double>& y,
                          const std::vector<double>& references,
                          const Constellation& c);

// Q((a1 - a0) / (2 sigma)); exact for steady-state BASK references, an
// upper bound when the bounded-range representatives are substituted.
double theoretical_pe_bask(double a0, double a1, double sigma);

// Standard normal tail probability.
double q_function(double x);

SequenceOutputTable build_sequence_table(const CircuitParams& params,
                                         const Constellation& c,
                                         double symbol_period, int window,
                                         double initial_voltage,
                                         int samples_per_period = 100,
                                         std::size_t budget = 65536);

// Exhaustive minimum squared Euclidean distance over all M^K candidates;
// ties break toward the lexicographically smallest sequence.
DetectionResult mlsd_detect(const std::vector<double>& y,
                            const SequenceOutputTable& table,
                            const Constellation& c);

/// Memoizing store for candidate-sequence tables, keyed by circuit,
/// constellation, symbol period, window and the initial voltage
/// quantized to 1 uV. Safe under concurrent build requests; the first
/// build wins and later callers reuse it.
class TableCache {
public:
    TableCache();
    ~TableCache();
    TableCache(const TableCache&) = delete;
    TableCache& operator=(const TableCache&) = delete;

    std::shared_ptr<const SequenceOutputTable> get_or_build(
        const CircuitParams& params, const Constellation& c,
        double symbol_period, int window, double initial_voltage,
        int samples_per_period = 100, std::size_t budget = 65536);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// MLSD over a full block of L symbols in consecutive windows of K
/// (K must divide L). The first window starts from an empty capacitor;
/// each later window chains from the noiseless end-state voltage of the
/// previously decided window.
DetectionResult detect_block(const std::vector<double>& y,
                             const CircuitParams& params,
                             const Constellation& c, double symbol_period,
                             int block_length, int window, TableCache& cache,
                             int samples_per_period = 100,
                             std::size_t budget = 65536);

} // namespace swipt
