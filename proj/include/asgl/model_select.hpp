#pragma once

#include "asgl/adaptive_weights.hpp"

namespace asgl {

/// Hyperparameter grid. Lambdas must be sorted decreasing so fits can be
/// warm-started along the path.
struct Grid {
    std::vector<double> lambdas;
    std::vector<double> alphas;
    std::vector<double> gamma1s{0.0};
    std::vector<double> gamma2s{0.0};
    std::vector<WeightKind> schemes{WeightKind::none};
    bool group_weights = true;  // false: v forced to 1 (AL-SGL variant)
    double variance_threshold_pct = 80.0;

    void validate() const;
};

/// 20 log-spaced lambdas from lambda_max down to 1e-3*lambda_max,
/// alpha in {0.05,...,0.95}, gamma in {0,0.5,1,1.5,2}.
Grid default_grid(const Dataset& train, const QuantileLevel& tau);

struct GridCombo {
    double lambda = 0.0;
    double alpha = 1.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    WeightKind scheme = WeightKind::none;
};

struct GridRow {
    GridCombo combo;
    double val_error = 0.0;
    bool converged = false;
};

struct GridSearchResult {
    GridCombo best_combo;
    double best_val_error = 0.0;
    FitResult best_fit;    // refit of the selected combination on train
    Weights best_weights;  // weights used by the selected combination
    std::vector<GridRow> table;
};

/// Mean check loss over the dataset (same kernel as qr_risk).
double quantile_error(const Vector& beta, const Dataset& d, const QuantileLevel& tau);

/// Exhaustive search: weights computed once per (scheme, gamma1, gamma2) on
/// train, fits warm-started along the decreasing lambda path, minimizer of the
/// validation error selected. Ties broken by larger lambda, larger alpha,
/// smaller gamma1, then smaller gamma2.
GridSearchResult grid_search(const Dataset& train, const Dataset& val,
                             const QuantileLevel& tau, const GroupStructure& groups,
                             const Grid& grid, const SolverOptions& opts = {},
                             unsigned num_threads = 1);

}  // namespace asgl
