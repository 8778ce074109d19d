// Acceptance suite: one pass/fail line per criterion, nonzero exit if any fail.
// Each criterion pins its tolerances in code; nothing is deferred to later
// calibration.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qape/counting.hpp"
#include "qape/detector.hpp"
#include "qape/estimator.hpp"
#include "qape/grover.hpp"
#include "qape/vdb.hpp"
#include "test_helpers.hpp"

using namespace qape;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << number << ": " << name;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!pass) ++failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CliResult {
    int status = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    CliResult result;
    FILE* pipe = popen((std::string(QAPE_CLI_PATH) + " " + args).c_str(), "r");
    if (pipe == nullptr) return result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) result.out.append(buffer, got);
    const int raw = pclose(pipe);
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return result;
}

Oracle mask_oracle(int n, const std::vector<char>& mask) {
    Oracle oracle;
    oracle.database_qubits = n;
    oracle.marked = [&mask](std::uint64_t x) { return mask[x] != 0; };
    return oracle;
}

// 1. Paper example: counts in the quoted brackets and detect picks -1, under 1 s.
void criterion_1() {
    const auto start = Clock::now();
    SystemModel model;  // defaults n=15, sigma=0.9, bin width 0.1
    const std::uint64_t minus = classical_count(model, -0.8, -1.0);
    const std::uint64_t plus = classical_count(model, -0.8, 1.0);
    EstimatorConfig config;  // subspace, t = n + 4
    const Decision decision = ml_decide(model, -0.8, config);
    const double elapsed = seconds_since(start);

    const bool counts_ok = minus > 1400 && minus <= 1500 && plus >= 150 && plus < 200;
    const CliResult cli = run_cli("detect --r -0.8");
    bool cli_ok = cli.status == 0;
    if (cli_ok) {
        cli_ok = nlohmann::json::parse(cli.out).at("chosen").get<double>() == -1.0;
    }
    std::ostringstream detail;
    detail << "counts " << minus << "/" << plus << ", chosen " << decision.chosen << ", "
           << elapsed << " s";
    report(1, "paper example reproduction", counts_ok && decision.chosen == -1.0 && cli_ok && elapsed < 1.0,
           detail.str());
}

// 2. Oracle equivalence across the s=-1 grid at n=8, t=12, under 30 s.
void criterion_2() {
    const auto start = Clock::now();
    SystemModel model;
    model.database_qubits = 8;
    EstimatorConfig config;
    config.counting_qubits = 12;
    const double N = static_cast<double>(model.database_size());
    bool ok = true;
    double worst = 0.0;
    for (double center : default_grid(model, -1.0)) {
        const std::uint64_t M = classical_count(model, center, -1.0);
        const double estimate = estimate_point(model, center, -1.0, config) * N;
        const double error = std::abs(estimate - static_cast<double>(M));
        const double bound = counting_error_bound(M, model.database_size(), 12);
        worst = std::max(worst, bound > 0.0 ? error / bound : error);
        ok = ok && error <= bound;
    }
    const double elapsed = seconds_since(start);
    std::ostringstream detail;
    detail << "worst error/bound " << worst << ", " << elapsed << " s";
    report(2, "quantum/classical oracle equivalence", ok && elapsed < 30.0, detail.str());
}

// 3. Coverage guarantee at N=256, t=10 across the M sweep.
void criterion_3() {
    const double floor_mass = 8.0 / (std::numbers::pi * std::numbers::pi) - 1e-9;
    bool ok = true;
    double lowest = 1.0;
    for (std::uint64_t M : {std::uint64_t{0}, std::uint64_t{1}, std::uint64_t{16},
                            std::uint64_t{128}, std::uint64_t{255}}) {
        const CountingOutcome outcome = subspace_count_distribution(256, M, 10);
        const double bound = counting_error_bound(M, 256, 10);
        double mass = 0.0;
        for (std::size_t m = 0; m < outcome.outcome_distribution.probabilities.size(); ++m) {
            if (std::abs(outcome.count_estimates[m] - static_cast<double>(M)) <= bound) {
                mass += outcome.outcome_distribution.probabilities[m];
            }
        }
        lowest = std::min(lowest, mass);
        ok = ok && mass >= floor_mass;
    }
    std::ostringstream detail;
    detail << "lowest coverage " << lowest << " vs 8/pi^2 " << 8.0 / (std::numbers::pi * std::numbers::pi);
    report(3, "counting coverage guarantee", ok, detail.str());
}

// 4. Backend equivalence on 20 random cases plus the paper-scale subspace run.
void criterion_4() {
    std::mt19937_64 rng(20260809);
    bool ok = true;
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 7);  // 2..8
        const int t = 1 + static_cast<int>(rng() % 8);  // 1..8
        const auto mask = test_helpers::random_mask(n, rng);
        const CountingOutcome full = quantum_count(
            mask_oracle(n, mask), CountingConfig{n, t, CountingBackend::full_statevector});
        const CountingOutcome sub = quantum_count(
            mask_oracle(n, mask), CountingConfig{n, t, CountingBackend::subspace});
        for (std::size_t m = 0; m < full.outcome_distribution.probabilities.size(); ++m) {
            const double diff = std::abs(full.outcome_distribution.probabilities[m] -
                                         sub.outcome_distribution.probabilities[m]);
            worst = std::max(worst, diff);
            ok = ok && diff <= 1e-8;
        }
    }

    SystemModel model;  // n = 15
    const auto start = Clock::now();
    EstimatorConfig config;
    config.counting_qubits = 19;
    const double mass = estimate_point(model, -0.8, -1.0, config);
    const double elapsed = seconds_since(start);
    ok = ok && mass > 0.0;
    std::ostringstream detail;
    detail << "worst per-outcome diff " << worst << ", paper-scale t=19 run " << elapsed << " s";
    report(4, "full vs subspace backend equivalence", ok && elapsed < 5.0, detail.str());
}

// 5. Grover success law on 50 random cases at 1e-9.
void criterion_5() {
    std::mt19937_64 rng(5150);
    bool ok = true;
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 1 + static_cast<int>(rng() % 8);  // 1..8
        std::vector<char> mask = test_helpers::random_mask(n, rng, 1);
        std::uint64_t M = 0;
        for (char m : mask) M += static_cast<std::uint64_t>(m);
        if (M == (std::uint64_t{1} << n)) {  // keep 1 <= M < N
            mask[0] = 0;
            --M;
        }
        const std::uint64_t k = rng() % 11;
        const MeasurementDistribution dist = search(mask_oracle(n, mask), k);
        double marked_mass = 0.0;
        for (std::size_t x = 0; x < dist.probabilities.size(); ++x) {
            if (mask[x]) marked_mass += dist.probabilities[x];
        }
        const double expected = predict_search(std::uint64_t{1} << n, M, k).success_probability;
        const double diff = std::abs(marked_mass - expected);
        worst = std::max(worst, diff);
        ok = ok && diff <= 1e-9;
    }
    std::ostringstream detail;
    detail << "worst |simulated - closed form| " << worst;
    report(5, "Grover success law", ok, detail.str());
}

// 6. Eq.-(1) convergence of the classical sweep against the analytic Gaussian.
void criterion_6() {
    auto l1_at = [](int n) {
        SystemModel model;
        model.database_qubits = n;
        EstimatorConfig config;
        config.backend = PdfBackend::classical;
        std::vector<double> grid;
        for (std::int64_t i = model.quantizer.bin_index(-4.0);
             i <= model.quantizer.bin_index(4.0); ++i) {
            grid.push_back(model.quantizer.bin_center(i));
        }
        const PdfEstimate est = estimate_pdf(model, 0.0, grid, config);
        return l1_distance(est, gaussian_bin_masses(est.grid, 0.0, model.noise_sigma,
                                                    model.quantizer.bin_width));
    };
    std::vector<double> values;
    for (int n : {8, 10, 12, 14}) values.push_back(l1_at(n));
    bool ok = values[2] <= 0.02;
    for (std::size_t i = 1; i < values.size(); ++i) ok = ok && values[i] <= values[i - 1];
    std::ostringstream detail;
    detail << "L1 = " << values[0] << ", " << values[1] << ", " << values[2] << ", " << values[3];
    report(6, "Eq.-(1) convergence to the analytic Gaussian", ok, detail.str());
}

// 7. KL properties: identity, nonnegativity, product-form independence.
void criterion_7() {
    bool ok = true;
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> uniform(0.01, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t bins = 2 + rng() % 8;
        std::vector<double> p(bins), q(bins);
        double ps = 0.0, qs = 0.0;
        for (std::size_t i = 0; i < bins; ++i) {
            p[i] = uniform(rng);
            q[i] = uniform(rng);
            ps += p[i];
            qs += q[i];
        }
        for (std::size_t i = 0; i < bins; ++i) {
            p[i] /= ps;
            q[i] /= qs;
        }
        ok = ok && kl_divergence(p, q) >= 0.0;
        ok = ok && std::abs(kl_divergence(p, p)) <= 1e-12;
    }
    const double row[] = {0.3, 0.7};
    const double col[] = {0.45, 0.55};
    std::vector<double> joint;
    for (double a : row) {
        for (double b : col) joint.push_back(a * b);
    }
    const double r0 = joint[0] + joint[1], r1 = joint[2] + joint[3];
    const double c0 = joint[0] + joint[2], c1 = joint[1] + joint[3];
    const std::vector<double> product = {r0 * c0, r0 * c1, r1 * c0, r1 * c1};
    const double independent = kl_divergence(joint, product);
    ok = ok && std::abs(independent) <= 1e-12;
    std::ostringstream detail;
    detail << "independent-case KL " << independent;
    report(7, "KL identity/nonnegativity/independence", ok, detail.str());
}

// 8. Byte-identical output across consecutive runs of every subcommand.
void criterion_8() {
    const CliResult pdf_once = run_cli("estimate-pdf --n 10 --s -1 --output /tmp/qape_accept_pdf.csv");
    (void)pdf_once;
    const std::vector<std::string> invocations = {
        "detect --r -0.8",
        "detect --r -0.8 --backend classical --format csv",
        "estimate-point --r -0.8 --s -1",
        "estimate-pdf --n 10 --s -1",
        "count --n 8 --marked-bin -0.8 --s -1 --t 10",
        "count --n 6 --marked-bin -0.8 --s -1 --t 8 --format json --samples 32 --seed 7",
        "search --n 8 --r -0.8 --s -1",
        "detect-sweep --n 8 --grid_min -1 --grid_max 1",
        "dump-vdb --n 6 --s -1",
        "kl /tmp/qape_accept_pdf.csv /tmp/qape_accept_pdf.csv",
    };
    bool ok = true;
    std::string first_mismatch;
    for (const std::string& args : invocations) {
        const CliResult a = run_cli(args);
        const CliResult b = run_cli(args);
        const bool same = a.status == 0 && b.status == 0 && a.out == b.out;
        if (!same && first_mismatch.empty()) first_mismatch = args;
        ok = ok && same;
    }
    report(8, "byte-identical CLI determinism", ok,
           ok ? std::to_string(invocations.size()) + " subcommand invocations"
              : "mismatch: " + first_mismatch);
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all 8 criteria passed\n";
    return 0;
}
