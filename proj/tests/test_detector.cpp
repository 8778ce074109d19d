#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qape/detector.hpp"

using namespace qape;
using Catch::Matchers::ContainsSubstring;

namespace {

SystemModel default_model(int n = 15) {
    SystemModel model;
    model.database_qubits = n;
    return model;
}

EstimatorConfig backend(PdfBackend kind, int t = 0) {
    EstimatorConfig config;
    config.backend = kind;
    config.counting_qubits = t;
    return config;
}

} // namespace

TEST_CASE("the worked example decides -1 at r = -0.8") {
    const SystemModel model = default_model();
    for (PdfBackend kind : {PdfBackend::classical, PdfBackend::quantum_subspace}) {
        const Decision decision = ml_decide(model, -0.8, backend(kind));
        CHECK(decision.chosen == -1.0);
        CHECK_FALSE(decision.tied);
        REQUIRE(decision.per_symbol.size() == 2);
        // counts land on the brute-forced 1416-vs-197 split (the quantum
        // estimate stays within the counting bound of those integers)
        CHECK(std::abs(decision.per_symbol[0].count_estimate - 1416.0) < 1.0);
        CHECK(std::abs(decision.per_symbol[1].count_estimate - 197.0) < 1.0);
        CHECK(decision.margin > 7.0);
        CHECK(decision.margin < 7.4);
    }
}

TEST_CASE("the symmetric midpoint ties and resolves to the smaller symbol") {
    const SystemModel model = default_model();
    const Decision decision = ml_decide(model, 0.0, backend(PdfBackend::classical));
    CHECK(decision.tied);
    CHECK(decision.chosen == -1.0);
    CHECK(decision.margin == 1.0);
    CHECK(decision.per_symbol[0].mass == decision.per_symbol[1].mass);
}

TEST_CASE("a noiseless channel gives a one-sided margin") {
    SystemModel model = default_model(10);
    model.noise_sigma = 1e-9;
    const Decision decision = ml_decide(model, 1.0, backend(PdfBackend::classical));
    CHECK(decision.chosen == 1.0);
    CHECK(std::isinf(decision.margin));
    CHECK_FALSE(decision.tied);
}

TEST_CASE("values outside the modeled support raise a named error") {
    const SystemModel model = default_model(10);
    CHECK_THROWS_WITH(ml_decide(model, 4.9, backend(PdfBackend::classical)),
                      ContainsSubstring("outside modeled support"));
    CHECK_THROWS_WITH(ml_decide(model, 4.9, backend(PdfBackend::classical)),
                      ContainsSubstring("4.9"));
}

TEST_CASE("empty alphabets are rejected") {
    SystemModel model = default_model(8);
    model.source_alphabet.clear();
    CHECK_THROWS_AS(ml_decide(model, 0.0, backend(PdfBackend::classical)), std::invalid_argument);
}

TEST_CASE("backends agree wherever the classical margin is decisive", "[property]") {
    const SystemModel model = default_model(8);
    const EstimatorConfig classical = backend(PdfBackend::classical);
    const EstimatorConfig quantum = backend(PdfBackend::quantum_subspace, 12);
    const double N = static_cast<double>(model.database_size());
    for (std::int64_t i = model.quantizer.bin_index(-2.0); i <= model.quantizer.bin_index(2.0);
         ++i) {
        const double r = model.quantizer.bin_center(i);
        const std::uint64_t m_minus = classical_count(model, r, -1.0);
        const std::uint64_t m_plus = classical_count(model, r, 1.0);
        if (m_minus == 0 && m_plus == 0) continue;
        const double gap = std::abs(static_cast<double>(m_minus) - static_cast<double>(m_plus)) / N;
        const double worst_bound =
            std::max(counting_error_bound(m_minus, model.database_size(), 12),
                     counting_error_bound(m_plus, model.database_size(), 12)) /
            N;
        if (gap > 2.0 * worst_bound) {
            CHECK(ml_decide(model, r, classical).chosen == ml_decide(model, r, quantum).chosen);
        }
    }
}

TEST_CASE("decisions are antisymmetric for the BPSK alphabet", "[property]") {
    const SystemModel model = default_model(12);
    const EstimatorConfig classical = backend(PdfBackend::classical);
    for (double r : {-1.4, -0.8, -0.3, -0.1, 0.3, 0.9, 1.6}) {
        const Decision pos = ml_decide(model, r, classical);
        const Decision neg = ml_decide(model, -r, classical);
        CHECK(pos.chosen == -neg.chosen);
    }
}

TEST_CASE("the margin equals the count ratio (argmax invariance)") {
    const SystemModel model = default_model(12);
    const Decision decision = ml_decide(model, -0.6, backend(PdfBackend::classical));
    const double count_best = std::max(decision.per_symbol[0].count_estimate,
                                       decision.per_symbol[1].count_estimate);
    const double count_second = std::min(decision.per_symbol[0].count_estimate,
                                         decision.per_symbol[1].count_estimate);
    CHECK(decision.margin == count_best / count_second);
}
