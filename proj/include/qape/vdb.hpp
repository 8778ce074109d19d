#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qape/grover.hpp"
#include "qape/normal.hpp"

namespace qape {

/// Uniform quantizer. Bin centers sit at range_min + i*bin_width; bin identity
/// is always the integer index i = round((v - range_min)/bin_width), never a
/// floating-point comparison of centers. [range_min, range_max] is the default
/// sweep window, not a clamp: quantize is defined for any real input.
struct Quantizer {
    double bin_width = 0.1;
    double range_min = -5.0;
    double range_max = 5.0;

    std::int64_t bin_index(double v) const { return std::llround((v - range_min) / bin_width); }
    double bin_center(std::int64_t index) const {
        return range_min + static_cast<double>(index) * bin_width;
    }
    double quantize(double v) const { return bin_center(bin_index(v)); }
};

/// Parametric AWGN system model realizing the virtual database y = g(s, x):
/// source symbol s plus the x-th deterministic noise value, quantized. The
/// noise table is the inverse-CDF stratification n_x = sigma*Phi^-1((x+0.5)/N),
/// monotone in x and exactly reproducible; no RNG anywhere in this path.
/// Entries are generated on demand, never materialized by the estimator.
struct SystemModel {
    int database_qubits = 15;
    std::vector<double> source_alphabet = {-1.0, 1.0};
    double noise_sigma = 0.9;
    Quantizer quantizer;

    std::uint64_t database_size() const { return std::uint64_t{1} << database_qubits; }

    double noise(std::uint64_t x) const {
        const double p = (static_cast<double>(x) + 0.5) / static_cast<double>(database_size());
        return noise_sigma * inverse_normal_cdf(p);
    }
};

inline void validate_model(const SystemModel& model) {
    if (model.database_qubits < 1 || model.database_qubits > 62) {
        throw std::invalid_argument("SystemModel: database_qubits must be in [1, 62]");
    }
    if (!(model.noise_sigma > 0.0)) {
        throw std::invalid_argument("SystemModel: noise_sigma must be positive");
    }
    if (!(model.quantizer.bin_width > 0.0)) {
        throw std::invalid_argument("SystemModel: bin_width must be positive");
    }
    if (!(model.quantizer.range_min < model.quantizer.range_max)) {
        throw std::invalid_argument("SystemModel: range_min must be below range_max");
    }
    if (model.source_alphabet.empty()) {
        throw std::invalid_argument("SystemModel: source_alphabet must not be empty");
    }
}

/// Optional materialization of the full noise table; bit-identical to the
/// on-demand values by construction (same expression, same order).
inline std::vector<double> materialize_noise_table(const SystemModel& model) {
    std::vector<double> table(model.database_size());
    for (std::uint64_t x = 0; x < table.size(); ++x) table[x] = model.noise(x);
    return table;
}

/// The virtual-database generating function g(s, x) = quantize(s + n_x).
inline double g(const SystemModel& model, double s, std::uint64_t x) {
    if (x >= model.database_size()) {
        throw std::invalid_argument("g: index " + std::to_string(x) + " outside database of size " +
                                    std::to_string(model.database_size()));
    }
    return model.quantizer.quantize(s + model.noise(x));
}

/// Predicate over database indices: true where g(s, x) falls in the same bin
/// as the observed value r (integer-bin equality).
inline std::function<bool(std::uint64_t)> match_predicate(const SystemModel& model, double r,
                                                          double s) {
    const std::int64_t target_bin = model.quantizer.bin_index(r);
    const Quantizer quantizer = model.quantizer;
    const double sigma = model.noise_sigma;
    const std::uint64_t N = model.database_size();
    return [=](std::uint64_t x) {
        const double p = (static_cast<double>(x) + 0.5) / static_cast<double>(N);
        return quantizer.bin_index(s + sigma * inverse_normal_cdf(p)) == target_bin;
    };
}

/// Package the match predicate as a search/counting oracle. marked_count is
/// left unset: the quantum path works from the predicate alone.
inline Oracle match_oracle(const SystemModel& model, double r, double s) {
    Oracle oracle;
    oracle.database_qubits = model.database_qubits;
    oracle.marked = match_predicate(model, r, s);
    return oracle;
}

/// Ground truth: exact number of matching entries by a full O(N) sweep.
inline std::uint64_t classical_count(const SystemModel& model, double r, double s) {
    const auto pred = match_predicate(model, r, s);
    const std::uint64_t N = model.database_size();
    std::uint64_t count = 0;
    for (std::uint64_t x = 0; x < N; ++x) {
        if (pred(x)) ++count;
    }
    return count;
}

} // namespace qape
