#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qape {

using Complex = std::complex<double>;

/// Largest register the dense backend will allocate (2^26 amplitudes ~ 1 GiB).
/// Bigger databases go through the subspace counting backend instead.
inline constexpr int kDefaultMaxQubits = 26;

/// Thrown when a request would exceed the dense-statevector budget.
struct resource_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Contiguous sub-register [begin, begin + count).
/// Qubit ordering convention, fixed project-wide: qubit i is bit i of the
/// basis-state integer, i.e. qubit 0 is the least-significant bit.
struct QubitRange {
    int begin = 0;
    int count = 0;
};

/// Dense complex amplitude vector over 2^num_qubits basis states.
struct QuantumState {
    int num_qubits = 0;
    std::vector<Complex> amplitudes;

    std::uint64_t size() const { return amplitudes.size(); }
};

/// Exact probabilities of the 2^m outcomes of measuring an m-qubit sub-register.
struct MeasurementDistribution {
    std::vector<double> probabilities;
};

namespace detail {

inline void check_range(const QuantumState& state, QubitRange r, const char* op) {
    if (r.begin < 0 || r.count < 1 || r.begin + r.count > state.num_qubits) {
        throw std::invalid_argument(std::string(op) + ": invalid qubit range [" +
                                    std::to_string(r.begin) + ", " +
                                    std::to_string(r.begin + r.count) + ") for " +
                                    std::to_string(state.num_qubits) + "-qubit state");
    }
}

/// Visit every slice of `range`: for each configuration of the qubits outside
/// the range, gather the 2^range.count amplitudes into `scratch`, call fn, and
/// scatter back. When `control` >= 0 only slices whose control bit is 1 are
/// visited (control must lie outside the range).
template <class Fn>
void for_each_slice(QuantumState& state, QubitRange range, int control, Fn&& fn) {
    const std::uint64_t slice_len = std::uint64_t{1} << range.count;
    const std::uint64_t low_mask = (std::uint64_t{1} << range.begin) - 1;
    const std::uint64_t outer_count = state.size() >> range.count;
    std::vector<Complex> scratch(slice_len);
    for (std::uint64_t outer = 0; outer < outer_count; ++outer) {
        const std::uint64_t low = outer & low_mask;
        const std::uint64_t high = (outer & ~low_mask) << range.count;
        const std::uint64_t base = high | low;
        if (control >= 0 && ((base >> control) & 1) == 0) continue;
        for (std::uint64_t k = 0; k < slice_len; ++k) {
            scratch[k] = state.amplitudes[base | (k << range.begin)];
        }
        fn(std::span<Complex>(scratch));
        for (std::uint64_t k = 0; k < slice_len; ++k) {
            state.amplitudes[base | (k << range.begin)] = scratch[k];
        }
    }
}

/// In-place transform out[m] = 1/sqrt(n) * sum_k exp(sign*2*pi*i*k*m/n) v[k],
/// n a power of two. sign=+1 is the QFT matrix, sign=-1 its inverse.
/// Radix-2 with a per-call twiddle table; deterministic for a fixed input.
inline void fourier_pow2(std::span<Complex> v, int sign) {
    const std::size_t n = v.size();
    if (n == 1) return;
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(v[i], v[j]);
    }
    // twiddle table for the largest stage; smaller stages stride into it
    std::vector<Complex> twiddle(n / 2);
    const double base = sign * 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t j = 0; j < n / 2; ++j) {
        twiddle[j] = std::polar(1.0, base * static_cast<double>(j));
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        for (std::size_t block = 0; block < n; block += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                const Complex w = twiddle[j * stride];
                const Complex a = v[block + j];
                const Complex b = v[block + j + len / 2] * w;
                v[block + j] = a + b;
                v[block + j + len / 2] = a - b;
            }
        }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& a : v) a *= scale;
}

} // namespace detail

/// Uniform superposition over 2^num_qubits basis states (Hadamard on |0...0>).
inline QuantumState new_uniform(int num_qubits, int max_qubits = kDefaultMaxQubits) {
    if (num_qubits < 1) {
        throw std::invalid_argument("new_uniform: register needs at least one qubit");
    }
    if (num_qubits > max_qubits) {
        throw resource_error("new_uniform: " + std::to_string(num_qubits) +
                             " qubits need a vector of 2^" + std::to_string(num_qubits) +
                             " = " + std::to_string(std::uint64_t{1} << num_qubits) +
                             " complex amplitudes, above the " + std::to_string(max_qubits) +
                             "-qubit cap; use the subspace counting backend for larger databases");
    }
    QuantumState state;
    state.num_qubits = num_qubits;
    const std::uint64_t n = std::uint64_t{1} << num_qubits;
    state.amplitudes.assign(n, Complex{1.0 / std::sqrt(static_cast<double>(n)), 0.0});
    return state;
}

/// Flip the amplitude sign of every basis state whose `range` bits satisfy
/// `marked`. Defaults to the full register.
template <class Pred>
void apply_phase_oracle(QuantumState& state, Pred&& marked, QubitRange range) {
    detail::check_range(state, range, "apply_phase_oracle");
    const std::uint64_t mask = (std::uint64_t{1} << range.count) - 1;
    const std::uint64_t n = state.size();
    for (std::uint64_t x = 0; x < n; ++x) {
        if (marked((x >> range.begin) & mask)) state.amplitudes[x] = -state.amplitudes[x];
    }
}

template <class Pred>
void apply_phase_oracle(QuantumState& state, Pred&& marked) {
    apply_phase_oracle(state, std::forward<Pred>(marked), QubitRange{0, state.num_qubits});
}

/// Inversion about the mean on a contiguous sub-register: within each slice,
/// a_x -> 2*mean - a_x. Uniform slices are fixed points; applying it twice is
/// the identity.
inline void apply_diffusion(QuantumState& state, QubitRange range) {
    detail::check_range(state, range, "apply_diffusion");
    detail::for_each_slice(state, range, -1, [](std::span<Complex> slice) {
        Complex sum{0.0, 0.0};
        for (const Complex& a : slice) sum += a;
        const Complex mean = sum / static_cast<double>(slice.size());
        for (Complex& a : slice) a = 2.0 * mean - a;
    });
}

inline void apply_diffusion(QuantumState& state) {
    apply_diffusion(state, QubitRange{0, state.num_qubits});
}

/// QFT along a contiguous sub-register: |k> -> 1/sqrt(2^m) sum_m e^{2pi i km/2^m}|m>.
inline void apply_qft(QuantumState& state, QubitRange range) {
    detail::check_range(state, range, "apply_qft");
    detail::for_each_slice(state, range, -1,
                           [](std::span<Complex> slice) { detail::fourier_pow2(slice, +1); });
}

inline void apply_qft_inverse(QuantumState& state, QubitRange range) {
    detail::check_range(state, range, "apply_qft_inverse");
    detail::for_each_slice(state, range, -1,
                           [](std::span<Complex> slice) { detail::fourier_pow2(slice, -1); });
}

/// A unitary acting on a contiguous sub-register, expressed as a callback over
/// the gathered 2^target.count slice amplitudes (slice index = sub-register value).
struct SubregisterOp {
    QubitRange target;
    std::function<void(std::span<Complex>)> apply;
};

/// Apply op `power` times to every slice whose control bit is 1.
inline void apply_controlled_unitary(QuantumState& state, int control, const SubregisterOp& op,
                                     std::uint64_t power) {
    detail::check_range(state, op.target, "apply_controlled_unitary");
    if (control < 0 || control >= state.num_qubits) {
        throw std::invalid_argument("apply_controlled_unitary: control qubit " +
                                    std::to_string(control) + " out of register");
    }
    if (control >= op.target.begin && control < op.target.begin + op.target.count) {
        throw std::invalid_argument("apply_controlled_unitary: control qubit " +
                                    std::to_string(control) + " lies inside the target range");
    }
    if (power == 0) return;
    detail::for_each_slice(state, op.target, control, [&](std::span<Complex> slice) {
        for (std::uint64_t rep = 0; rep < power; ++rep) op.apply(slice);
    });
}

/// Exact outcome distribution of measuring a contiguous sub-register.
inline MeasurementDistribution measure_distribution(const QuantumState& state, QubitRange range) {
    detail::check_range(state, range, "measure_distribution");
    MeasurementDistribution dist;
    dist.probabilities.assign(std::uint64_t{1} << range.count, 0.0);
    const std::uint64_t mask = (std::uint64_t{1} << range.count) - 1;
    const std::uint64_t n = state.size();
    for (std::uint64_t x = 0; x < n; ++x) {
        dist.probabilities[(x >> range.begin) & mask] += std::norm(state.amplitudes[x]);
    }
    return dist;
}

inline MeasurementDistribution measure_distribution(const QuantumState& state) {
    return measure_distribution(state, QubitRange{0, state.num_qubits});
}

inline double state_norm(const QuantumState& state) {
    double sum = 0.0;
    for (const Complex& a : state.amplitudes) sum += std::norm(a);
    return std::sqrt(sum);
}

/// Sampled measurement: `count` outcomes drawn from the exact distribution with
/// a pinned generator (mt19937_64), the only randomness in the project.
inline std::vector<std::uint64_t> sample_outcomes(const MeasurementDistribution& dist, int count,
                                                  std::uint64_t seed) {
    std::vector<double> cumulative(dist.probabilities.size());
    double running = 0.0;
    for (std::size_t i = 0; i < dist.probabilities.size(); ++i) {
        running += dist.probabilities[i];
        cumulative[i] = running;
    }
    std::mt19937_64 rng(seed);
    std::vector<std::uint64_t> outcomes;
    outcomes.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * running;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), u);
        outcomes.push_back(static_cast<std::uint64_t>(it - cumulative.begin()));
    }
    return outcomes;
}

} // namespace qape
