#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qape/grover.hpp"
#include "qape/statevector.hpp"

namespace qape {

enum class CountingBackend {
    full_statevector,  // simulate database register + counting register, exact, small n+t
    subspace,          // counting register tensored with the iterate's 2D invariant span
};

struct CountingConfig {
    int database_qubits = 0;
    int counting_qubits = 0;
    CountingBackend backend = CountingBackend::subspace;
    int max_qubits = kDefaultMaxQubits;
};

/// Phase-estimation readout over the Grover iterate. `count_estimates[m]` is
/// the pushforward N*sin^2(pi*m/2^t); it satisfies M^(m) = M^(2^t - m), so the
/// +-eigenphase pair of an outcome maps to one count.
struct CountingOutcome {
    MeasurementDistribution outcome_distribution;
    std::vector<double> count_estimates;
    std::uint64_t most_probable_outcome = 0;
    double point_estimate = 0.0;
};

/// M^ = N*sin^2(pi*m/2^t): counting outcome m to estimated solution count.
inline double phase_to_count(std::uint64_t m, int counting_qubits, std::uint64_t database_size) {
    if (counting_qubits < 1 || m >= (std::uint64_t{1} << counting_qubits)) {
        throw std::invalid_argument("phase_to_count: outcome out of range");
    }
    const double s = std::sin(std::numbers::pi * static_cast<double>(m) /
                              static_cast<double>(std::uint64_t{1} << counting_qubits));
    return static_cast<double>(database_size) * s * s;
}

/// Guaranteed accuracy of quantum counting with t qubits:
/// |M^ - M| <= 2*pi*sqrt(M(N-M))/2^t + pi^2*N/2^(2t)
/// for the outcomes carrying at least 8/pi^2 of the probability mass.
inline double counting_error_bound(std::uint64_t marked_count, std::uint64_t database_size,
                                   int counting_qubits) {
    if (counting_qubits < 1 || marked_count > database_size) {
        throw std::invalid_argument("counting_error_bound: need 0 <= M <= N, t >= 1");
    }
    const double M = static_cast<double>(marked_count);
    const double N = static_cast<double>(database_size);
    const double T = static_cast<double>(std::uint64_t{1} << counting_qubits);
    return 2.0 * std::numbers::pi * std::sqrt(M * (N - M)) / T +
           std::numbers::pi * std::numbers::pi * N / (T * T);
}

namespace detail {

inline CountingOutcome finish_outcome(MeasurementDistribution dist, int counting_qubits,
                                      std::uint64_t database_size) {
    CountingOutcome out;
    out.outcome_distribution = std::move(dist);
    const std::uint64_t T = std::uint64_t{1} << counting_qubits;
    out.count_estimates.resize(T);
    for (std::uint64_t m = 0; m < T; ++m) {
        out.count_estimates[m] = phase_to_count(m, counting_qubits, database_size);
    }
    // ties resolve to the smallest outcome; the +-phase twin gives the same M^
    const auto& p = out.outcome_distribution.probabilities;
    out.most_probable_outcome =
        static_cast<std::uint64_t>(std::max_element(p.begin(), p.end()) - p.begin());
    out.point_estimate = out.count_estimates[out.most_probable_outcome];
    return out;
}

} // namespace detail

/// Exact counting distribution from the 2D invariant span of the Grover
/// iterate. From the uniform database state the full circuit never leaves
/// span{uniform-over-unmarked, uniform-over-marked}, where the iterate is a
/// rotation by 2*theta; simulating the counting register against that span
/// reproduces the full-backend distribution while scaling to the 15-qubit
/// database the full backend cannot reach once t counting qubits are appended.
/// M itself comes from a classical predicate sweep, a simulation shortcut the
/// CLI reports, not a quantum-speedup claim.
inline CountingOutcome subspace_count_distribution(std::uint64_t database_size,
                                                   std::uint64_t marked_count, int counting_qubits) {
    if (counting_qubits < 1) {
        throw std::invalid_argument("subspace_count_distribution: need t >= 1");
    }
    const double theta = grover_theta(database_size, marked_count);
    const std::uint64_t T = std::uint64_t{1} << counting_qubits;
    // After the controlled powers, counting-register amplitude k carries
    // G^k(uniform) = cos((2k+1)theta)|unmarked> + sin((2k+1)theta)|marked>.
    std::vector<Complex> unmarked(T);
    std::vector<Complex> marked(T);
    const double scale = 1.0 / std::sqrt(static_cast<double>(T));
    for (std::uint64_t k = 0; k < T; ++k) {
        const double angle = static_cast<double>(2 * k + 1) * theta;
        unmarked[k] = Complex{std::cos(angle) * scale, 0.0};
        marked[k] = Complex{std::sin(angle) * scale, 0.0};
    }
    detail::fourier_pow2(std::span<Complex>(unmarked), -1);
    detail::fourier_pow2(std::span<Complex>(marked), -1);
    MeasurementDistribution dist;
    dist.probabilities.resize(T);
    for (std::uint64_t m = 0; m < T; ++m) {
        dist.probabilities[m] = std::norm(unmarked[m]) + std::norm(marked[m]);
    }
    return detail::finish_outcome(std::move(dist), counting_qubits, database_size);
}

/// Quantum counting (Fig.-1 style): phase estimation of the Grover iterate on
/// the uniform database state. The full backend simulates the whole n+t-qubit
/// circuit; the subspace backend produces the identical distribution via the
/// 2D reduction above. Both precompute the oracle predicate over 0..N-1 once
/// (an O(N) classical pass); oracle.marked_count is never consulted.
inline CountingOutcome quantum_count(const Oracle& oracle, const CountingConfig& config) {
    if (config.counting_qubits < 1) {
        throw std::invalid_argument("quantum_count: need at least one counting qubit");
    }
    if (config.database_qubits != oracle.database_qubits) {
        throw std::invalid_argument("quantum_count: config/oracle register size mismatch");
    }
    const int n = config.database_qubits;
    const int t = config.counting_qubits;
    const std::uint64_t N = std::uint64_t{1} << n;

    std::vector<char> mask(N);
    for (std::uint64_t x = 0; x < N; ++x) mask[x] = oracle.marked(x) ? 1 : 0;

    if (config.backend == CountingBackend::subspace) {
        std::uint64_t M = 0;
        for (std::uint64_t x = 0; x < N; ++x) M += static_cast<std::uint64_t>(mask[x]);
        return subspace_count_distribution(N, M, t);
    }

    QuantumState state = new_uniform(n + t, config.max_qubits);
    SubregisterOp iterate;
    iterate.target = QubitRange{0, n};
    iterate.apply = [&mask](std::span<Complex> slice) {
        Complex sum{0.0, 0.0};
        for (std::size_t x = 0; x < slice.size(); ++x) {
            if (mask[x]) slice[x] = -slice[x];
            sum += slice[x];
        }
        const Complex mean = sum / static_cast<double>(slice.size());
        for (Complex& a : slice) a = 2.0 * mean - a;
    };
    for (int j = 0; j < t; ++j) {
        apply_controlled_unitary(state, n + j, iterate, std::uint64_t{1} << j);
    }
    const QubitRange counting{n, t};
    apply_qft_inverse(state, counting);
    return detail::finish_outcome(measure_distribution(state, counting), t, N);
}

} // namespace qape
