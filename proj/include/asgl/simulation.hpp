#pragma once

#include <cstdint>
#include <string>

#include "asgl/model_select.hpp"

namespace asgl {

/// Synthetic benchmark scenario: grouped Gaussian covariates with
/// within-group correlation, y = X beta + eps, eps ~ t(noise_df).
struct Scenario {
    std::string name = "custom";
    int K = 0;
    int group_size = 0;
    Vector beta_true;
    double rho_within = 0.5;
    double noise_df = 3.0;
    SplitSpec sizes;

    int p() const { return K * group_size; }
    GroupStructure groups() const { return GroupStructure::contiguous(K, group_size); }

    /// sim1_p225, sim1_p625, sim2_p225, sim2_p625, sim3_sparse, sim3_dense
    static Scenario by_name(const std::string& name);
};

struct MetricsReport {
    double dist = 0.0;
    double Et = 0.0;
    double csr = 0.0;
    double tpr = 0.0;
    double tnr = 0.0;
};

/// Draws the scenario's full dataset (train+val+test rows); deterministic per seed.
std::pair<Dataset, Vector> generate(const Scenario& s, std::uint64_t seed);

/// dist = ||beta_hat - beta_true||_2; a coefficient counts as selected when
/// |beta_hat_j| > zero_tol. CSR is the per-coefficient correct-classification
/// rate (the support-recovery reading of the correct selection rate).
MetricsReport metrics(const Vector& beta_hat, const Vector& beta_true, double Et,
                      double zero_tol = 1e-6);

/// Named model: a hyperparameter grid evaluated by grid_search per repetition.
/// An empty lambda list is materialized per repetition as n_lambdas log-spaced
/// values from lambda_max down to lambda_min_ratio * lambda_max.
struct ModelConfig {
    std::string name;
    Grid grid;
    int n_lambdas = 20;
    double lambda_min_ratio = 1e-3;
};

ModelConfig lasso_model();
ModelConfig sgl_model(std::vector<double> alphas = {});
ModelConfig asgl_model(WeightKind kind, std::vector<double> alphas = {},
                       std::vector<double> gammas = {});
ModelConfig alsgl_model(WeightKind kind, std::vector<double> alphas = {},
                        std::vector<double> gammas = {});

struct RepetitionRecord {
    int repetition = 0;
    std::string model;
    MetricsReport m;
    GridCombo selected;
    bool ok = false;
    std::string error;
};

struct ModelSummary {
    std::string model;
    MetricsReport mean;
    MetricsReport sd;
    int repetitions_used = 0;
    int failures = 0;
};

struct ExperimentResult {
    std::vector<ModelSummary> summaries;  // one per model, input order
    std::vector<RepetitionRecord> rows;   // repetition-major
};

/// Repetition r draws data with seed base_seed + r, so every model sees
/// identical data. Failed repetitions are excluded from the summaries.
ExperimentResult run_experiment(const Scenario& s,
                                const std::vector<ModelConfig>& models,
                                int repetitions, std::uint64_t base_seed,
                                double tau = 0.5, const SolverOptions& opts = {},
                                unsigned num_threads = 1);

}  // namespace asgl
