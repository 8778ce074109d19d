#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qape/counting.hpp"
#include "qape/vdb.hpp"

namespace qape {

/// How f^(r|s) is obtained. The classical route is the verification oracle
/// (exact M/N); the quantum routes go through counting.
enum class PdfBackend { classical, quantum_subspace, quantum_full };

inline const char* backend_name(PdfBackend backend) {
    switch (backend) {
        case PdfBackend::classical: return "classical";
        case PdfBackend::quantum_subspace: return "subspace";
        case PdfBackend::quantum_full: return "full";
    }
    return "unknown";
}

struct EstimatorConfig {
    PdfBackend backend = PdfBackend::quantum_subspace;
    int counting_qubits = 0;  // 0 -> database_qubits + 4
    int max_qubits = kDefaultMaxQubits;

    int resolved_counting_qubits(const SystemModel& model) const {
        return counting_qubits > 0 ? counting_qubits : model.database_qubits + 4;
    }
};

/// Estimated conditional pdf on a grid of bin centers. Eq.-(4)-style values
/// are bin masses (M^/N); density = mass / bin_width is what an L1 integral
/// compares. Both are carried, labelled apart.
struct PdfEstimate {
    std::vector<double> grid;
    std::vector<double> mass;
    std::vector<double> density;
    // metadata
    std::uint64_t database_size = 0;
    int counting_qubits = 0;
    double sigma = 0.0;
    double bin_width = 0.0;
    double symbol = 0.0;
    PdfBackend backend = PdfBackend::classical;
    int off_center_inputs = 0;  // grid values that had to be quantized first
};

/// Pointwise Eq.-(4) estimate f^(r|s) = M^/N (exact M/N on the classical path).
inline double estimate_point(const SystemModel& model, double r, double s,
                             const EstimatorConfig& config) {
    const double N = static_cast<double>(model.database_size());
    if (config.backend == PdfBackend::classical) {
        return static_cast<double>(classical_count(model, r, s)) / N;
    }
    CountingConfig counting;
    counting.database_qubits = model.database_qubits;
    counting.counting_qubits = config.resolved_counting_qubits(model);
    counting.backend = config.backend == PdfBackend::quantum_full
                           ? CountingBackend::full_statevector
                           : CountingBackend::subspace;
    counting.max_qubits = config.max_qubits;
    return quantum_count(match_oracle(model, r, s), counting).point_estimate / N;
}

/// Default sweep grid for the pdf of symbol s: every bin center within 4 sigma.
inline std::vector<double> default_grid(const SystemModel& model, double s) {
    const Quantizer& q = model.quantizer;
    const std::int64_t lo = q.bin_index(q.quantize(s - 4.0 * model.noise_sigma));
    const std::int64_t hi = q.bin_index(q.quantize(s + 4.0 * model.noise_sigma));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t i = lo; i <= hi; ++i) grid.push_back(q.bin_center(i));
    return grid;
}

/// Grid covering the entire reachable support of g(s, .): the noise table is
/// monotone, so the extreme entries bound every bin the model can hit. On the
/// classical backend the masses over this grid sum to exactly 1.
inline std::vector<double> support_grid(const SystemModel& model, double s) {
    const Quantizer& q = model.quantizer;
    const std::int64_t lo = q.bin_index(s + model.noise(0));
    const std::int64_t hi = q.bin_index(s + model.noise(model.database_size() - 1));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t i = lo; i <= hi; ++i) grid.push_back(q.bin_center(i));
    return grid;
}

/// Whole-pdf sweep: one estimate_point per grid value, output aligned with the
/// input grid. Grid values off bin centers are quantized first and counted in
/// off_center_inputs so the caller can warn.
inline PdfEstimate estimate_pdf(const SystemModel& model, double s, std::span<const double> grid,
                                const EstimatorConfig& config) {
    PdfEstimate est;
    est.database_size = model.database_size();
    est.counting_qubits =
        config.backend == PdfBackend::classical ? 0 : config.resolved_counting_qubits(model);
    est.sigma = model.noise_sigma;
    est.bin_width = model.quantizer.bin_width;
    est.symbol = s;
    est.backend = config.backend;
    est.grid.reserve(grid.size());
    est.mass.reserve(grid.size());
    est.density.reserve(grid.size());
    for (double r : grid) {
        const double center = model.quantizer.quantize(r);
        if (std::abs(center - r) > 1e-9 * std::max(1.0, std::abs(r))) ++est.off_center_inputs;
        const double mass = estimate_point(model, center, s, config);
        est.grid.push_back(center);
        est.mass.push_back(mass);
        est.density.push_back(mass / model.quantizer.bin_width);
    }
    return est;
}

/// Analytic Gaussian reference: exact bin masses Phi((c+D/2-mean)/sigma) -
/// Phi((c-D/2-mean)/sigma) on a grid of centers; the Eq.-(1) baseline.
inline std::vector<double> gaussian_bin_masses(std::span<const double> grid, double mean,
                                               double sigma, double bin_width) {
    std::vector<double> masses;
    masses.reserve(grid.size());
    for (double c : grid) {
        masses.push_back(normal_cdf((c + bin_width / 2.0 - mean) / sigma) -
                         normal_cdf((c - bin_width / 2.0 - mean) / sigma));
    }
    return masses;
}

namespace detail {

inline void check_same_grid(std::span<const double> a, std::span<const double> b,
                            const char* op) {
    if (a.size() != b.size() || !std::equal(a.begin(), a.end(), b.begin())) {
        throw std::invalid_argument(std::string(op) + ": grid mismatch");
    }
}

} // namespace detail

/// Riemann form of the Eq.-(1) distance: sum |density_a - density_b| * bin_width,
/// i.e. the L1 distance between the two bin-mass vectors.
inline double l1_distance(const PdfEstimate& estimate, std::span<const double> reference_mass) {
    if (reference_mass.size() != estimate.mass.size()) {
        throw std::invalid_argument("l1_distance: grid mismatch");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < reference_mass.size(); ++j) {
        total += std::abs(estimate.mass[j] - reference_mass[j]);
    }
    return total;
}

inline double l1_distance(const PdfEstimate& a, const PdfEstimate& b) {
    detail::check_same_grid(a.grid, b.grid, "l1_distance");
    return l1_distance(a, b.mass);
}

/// Discrete KL divergence sum_j p_j ln(p_j/q_j) over bins with p_j > 0.
/// A bin with p_j > 0 but q_j = 0 yields +infinity (documented result, not an
/// exception); nonnegativity is Gibbs' inequality for normalized inputs.
inline double kl_divergence(std::span<const double> p_mass, std::span<const double> q_mass) {
    if (p_mass.size() != q_mass.size()) {
        throw std::invalid_argument("kl_divergence: grid mismatch");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < p_mass.size(); ++j) {
        if (p_mass[j] < 0.0 || q_mass[j] < 0.0) {
            throw std::invalid_argument("kl_divergence: negative bin mass");
        }
        if (p_mass[j] == 0.0) continue;
        if (q_mass[j] == 0.0) return std::numeric_limits<double>::infinity();
        total += p_mass[j] * std::log(p_mass[j] / q_mass[j]);
    }
    return total;
}

inline double kl_divergence(const PdfEstimate& p, const PdfEstimate& q) {
    detail::check_same_grid(p.grid, q.grid, "kl_divergence");
    return kl_divergence(p.mass, q.mass);
}

} // namespace qape
