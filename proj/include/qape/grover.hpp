#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "qape/statevector.hpp"

namespace qape {

/// Marks the database indices whose virtual-database entry equals the observed
/// value. `marked_count` is verification-only metadata: the quantum path takes
/// just the predicate and never reads it.
struct Oracle {
    int database_qubits = 0;
    std::function<bool(std::uint64_t)> marked;
    std::optional<std::uint64_t> marked_count;

    std::uint64_t database_size() const { return std::uint64_t{1} << database_qubits; }
};

/// Closed-form accounting for a k-iteration search: sin^2((2k+1)*theta) with
/// sin^2(theta) = M/N.
struct GroverTrace {
    std::uint64_t iterations = 0;
    double success_probability = 0.0;
    double theta = 0.0;
};

/// Rotation angle of one Grover iterate, theta = asin(sqrt(M/N)).
inline double grover_theta(std::uint64_t database_size, std::uint64_t marked_count) {
    if (marked_count > database_size || database_size == 0) {
        throw std::invalid_argument("grover_theta: need 0 <= M <= N, N >= 1");
    }
    return std::asin(std::sqrt(static_cast<double>(marked_count) /
                               static_cast<double>(database_size)));
}

inline GroverTrace predict_search(std::uint64_t database_size, std::uint64_t marked_count,
                                  std::uint64_t iterations) {
    const double theta = grover_theta(database_size, marked_count);
    const double angle = static_cast<double>(2 * iterations + 1) * theta;
    return GroverTrace{iterations, std::sin(angle) * std::sin(angle), theta};
}

/// One Grover iterate: phase oracle then inversion about the mean.
inline void grover_iterate(QuantumState& state, const Oracle& oracle) {
    if (state.num_qubits != oracle.database_qubits) {
        throw std::invalid_argument("grover_iterate: state has " +
                                    std::to_string(state.num_qubits) + " qubits, oracle expects " +
                                    std::to_string(oracle.database_qubits));
    }
    apply_phase_oracle(state, oracle.marked);
    apply_diffusion(state);
}

/// The standard floor((pi/4)*sqrt(N/M)) iteration count.
inline std::uint64_t optimal_iterations(std::uint64_t database_size, std::uint64_t marked_count) {
    if (marked_count == 0) {
        throw std::invalid_argument("optimal_iterations: no marked items: search undefined, use counting");
    }
    if (marked_count > database_size) {
        throw std::invalid_argument("optimal_iterations: M exceeds N");
    }
    const double k = std::floor(std::numbers::pi / 4.0 *
                                std::sqrt(static_cast<double>(database_size) /
                                          static_cast<double>(marked_count)));
    return static_cast<std::uint64_t>(std::max(0.0, k));
}

/// Run `iterations` Grover iterates from the uniform state and read out the
/// exact measurement distribution.
inline MeasurementDistribution search(const Oracle& oracle, std::uint64_t iterations,
                                      int max_qubits = kDefaultMaxQubits) {
    QuantumState state = new_uniform(oracle.database_qubits, max_qubits);
    for (std::uint64_t k = 0; k < iterations; ++k) grover_iterate(state, oracle);
    return measure_distribution(state);
}

} // namespace qape
