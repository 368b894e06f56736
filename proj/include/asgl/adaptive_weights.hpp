#pragma once

#include "asgl/reduction.hpp"
#include "asgl/solver.hpp"

namespace asgl {

enum class WeightKind { pca_d, pca_1, pls_d, pls_1, unpenalized, none };

WeightKind weight_kind_from_string(const std::string& s);
std::string to_string(WeightKind k);

struct WeightScheme {
    WeightKind kind = WeightKind::none;
    double gamma1 = 1.0;
    double gamma2 = 1.0;
    double variance_threshold_pct = 80.0;
    double weight_cap = 1e8;
};

struct Weights {
    Vector w;  // per variable
    Vector v;  // per group
};

/// (w, v) from reciprocal powers of a coefficient estimate:
/// w_j = 1/|b_j|^g1, v_l = 1/||b^l||^g2, capped at weight_cap.
Weights weights_from_estimate(const Vector& estimate, const GroupStructure& groups,
                              const WeightScheme& scheme);

Weights weights_pca_d(const Dataset& train, const QuantileLevel& tau,
                      const GroupStructure& groups, const WeightScheme& scheme,
                      const SolverOptions& opts = {});
Weights weights_pca_1(const Dataset& train, const GroupStructure& groups,
                      const WeightScheme& scheme);
Weights weights_pls_d(const Dataset& train, const QuantileLevel& tau,
                      const GroupStructure& groups, const WeightScheme& scheme,
                      const SolverOptions& opts = {});
Weights weights_pls_1(const Dataset& train, const GroupStructure& groups,
                      const WeightScheme& scheme);
Weights weights_unpenalized(const Dataset& train, const QuantileLevel& tau,
                            const GroupStructure& groups, const WeightScheme& scheme,
                            const SolverOptions& opts = {});

/// Dispatch on scheme.kind; kind none yields all-ones weights.
Weights compute_weights(const Dataset& train, const QuantileLevel& tau,
                        const GroupStructure& groups, const WeightScheme& scheme,
                        const SolverOptions& opts = {});

}  // namespace asgl
