#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qape/estimator.hpp"
#include "qape/vdb.hpp"

namespace qape {

struct SymbolScore {
    double symbol = 0.0;
    double count_estimate = 0.0;  // M^ for this symbol
    double mass = 0.0;            // f^(r|s) = M^/N
};

/// Outcome of the ML comparator. margin = best mass / second-best mass
/// (+infinity when the runner-up mass is zero); exact ties resolve to the
/// smallest symbol and raise `tied`.
struct Decision {
    double received = 0.0;
    std::vector<SymbolScore> per_symbol;
    double chosen = 0.0;
    double margin = 1.0;
    bool tied = false;
};

/// Maximum-likelihood decision: estimate f^(r|s) for every alphabet symbol and
/// pick the argmax. Pure ML, no priors.
inline Decision ml_decide(const SystemModel& model, double r, const EstimatorConfig& config) {
    if (model.source_alphabet.empty()) {
        throw std::invalid_argument("ml_decide: empty source alphabet");
    }
    Decision decision;
    decision.received = r;
    const double N = static_cast<double>(model.database_size());
    for (double s : model.source_alphabet) {
        const double mass = estimate_point(model, r, s, config);
        decision.per_symbol.push_back(SymbolScore{s, mass * N, mass});
    }

    std::vector<SymbolScore> ranked = decision.per_symbol;
    std::sort(ranked.begin(), ranked.end(), [](const SymbolScore& a, const SymbolScore& b) {
        if (a.mass != b.mass) return a.mass > b.mass;
        return a.symbol < b.symbol;
    });
    const SymbolScore& best = ranked.front();
    if (best.mass == 0.0) {
        char message[128];
        std::snprintf(message, sizeof(message),
                      "ml_decide: r outside modeled support (r = %.10g, bin center %.10g)", r,
                      model.quantizer.quantize(r));
        throw std::runtime_error(message);
    }
    decision.chosen = best.symbol;
    if (ranked.size() > 1) {
        const SymbolScore& second = ranked[1];
        decision.tied = second.mass == best.mass;
        decision.margin = second.mass > 0.0 ? best.mass / second.mass
                                            : std::numeric_limits<double>::infinity();
    }
    return decision;
}

} // namespace qape
