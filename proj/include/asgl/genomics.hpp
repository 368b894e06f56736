#pragma once

#include "asgl/simulation.hpp"

namespace asgl {

struct PreprocessSpec {
    double expression_percentile = 25.0;
    double fold_variation_min = 2.0;
    double abs_correlation_min = 0.5;
    bool log_scale = true;  // fold variation read as max - min >= log(fold)

    void validate() const;
};

struct PreprocessResult {
    Dataset data;            // survivors, standardized (X and y)
    std::vector<int> kept;   // surviving column indices of the input
};

/// Expression-style screening: sufficiently expressed (column max above the
/// whole-matrix percentile), sufficiently variable (fold rule), then
/// |correlation with the response| above the threshold. Survivors are
/// standardized.
PreprocessResult preprocess(const Dataset& d, const PreprocessSpec& spec);

/// Groups variables by the principal component carrying their largest
/// absolute loading; empty groups are dropped and indices compacted.
GroupStructure pca_cluster(const Matrix& X);

struct StabilityReport {
    std::vector<std::string> model_names;
    std::vector<double> taus;
    int repetitions = 0;
    double probability_threshold = 0.5;
    // indexed [model][tau], each a length-p vector of selection counts / repetitions
    std::vector<std::vector<Vector>> selection_probability;
    // variables with probability >= threshold, per model and tau
    std::vector<std::vector<std::vector<int>>> thresholded;
    // per model: variables above the threshold at every tau
    std::vector<std::vector<int>> cross_tau_intersection;
    int failures = 0;
};

/// Repeats (split, grid search, record selected support) and aggregates
/// selection probabilities per model and quantile level.
StabilityReport stability_analysis(const Dataset& d, const GroupStructure& groups,
                                   const std::vector<double>& taus,
                                   const std::vector<ModelConfig>& models,
                                   int repetitions, const SplitSpec& split_sizes,
                                   std::uint64_t base_seed,
                                   const SolverOptions& opts = {},
                                   unsigned num_threads = 1);

}  // namespace asgl
