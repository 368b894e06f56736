#include "asgl/genomics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asgl/parallel.hpp"
#include "asgl/reduction.hpp"

namespace asgl {

void PreprocessSpec::validate() const {
    if (!(expression_percentile > 0.0 && expression_percentile < 100.0))
        throw std::invalid_argument("expression_percentile must lie in (0,100)");
    if (!(fold_variation_min >= 1.0))
        throw std::invalid_argument("fold_variation_min must be >= 1");
    if (!(abs_correlation_min >= 0.0 && abs_correlation_min < 1.0))
        throw std::invalid_argument("abs_correlation_min must lie in [0,1)");
}

namespace {

double percentile_of_all(const Matrix& X, double pct) {
    std::vector<double> vals(X.data(), X.data() + X.size());
    std::sort(vals.begin(), vals.end());
    double pos = pct / 100.0 * double(vals.size() - 1);
    auto lo = std::size_t(std::floor(pos));
    auto hi = std::min(lo + 1, vals.size() - 1);
    double frac = pos - double(lo);
    return vals[lo] * (1.0 - frac) + vals[hi] * frac;
}

double pearson(const Vector& a, const Vector& b) {
    Vector ac = a.array() - a.mean();
    Vector bc = b.array() - b.mean();
    double denom = ac.norm() * bc.norm();
    return denom > 0.0 ? ac.dot(bc) / denom : 0.0;
}

}  // namespace

PreprocessResult preprocess(const Dataset& d, const PreprocessSpec& spec) {
    spec.validate();
    const double expr_cut = percentile_of_all(d.X, spec.expression_percentile);

    std::vector<int> kept;
    for (int j = 0; j < d.p(); ++j) {
        Vector col = d.X.col(j);
        double mx = col.maxCoeff(), mn = col.minCoeff();
        if (!(mx > expr_cut)) continue;  // insufficiently expressed
        bool variable;
        if (spec.log_scale) {
            variable = (mx - mn) >= std::log(spec.fold_variation_min);
        } else {
            variable = mn > 0.0 ? (mx / mn >= spec.fold_variation_min) : mx > mn;
        }
        if (!variable) continue;
        if (std::abs(pearson(col, d.y)) <= spec.abs_correlation_min) continue;
        kept.push_back(j);
    }
    if (kept.empty())
        throw std::runtime_error("preprocess: no variables survive the filters");

    Matrix Xk(d.n(), Eigen::Index(kept.size()));
    std::vector<std::string> names;
    for (std::size_t c = 0; c < kept.size(); ++c) {
        Xk.col(Eigen::Index(c)) = d.X.col(kept[c]);
        if (!d.feature_names.empty()) names.push_back(d.feature_names[kept[c]]);
    }
    auto [std_data, params] =
        standardize(Dataset(std::move(Xk), d.y, std::move(names)));
    // standardize the response as well; the pipeline works on z-scores
    double ysd = std::sqrt((std_data.y.array() - std_data.y.mean()).square().sum() /
                           double(d.n() - 1));
    if (ysd > 0.0)
        std_data.y = (std_data.y.array() - std_data.y.mean()) / ysd;
    return {std::move(std_data), std::move(kept)};
}

GroupStructure pca_cluster(const Matrix& X) {
    if (X.rows() < 2) throw std::invalid_argument("pca_cluster requires n >= 2");
    PcaModel m = pca(X);
    std::vector<int> raw(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        Eigen::Index imax = 0;
        m.Q.row(j).cwiseAbs().maxCoeff(&imax);
        raw[j] = int(imax);
    }
    // compact group indices, dropping components that attracted no variable
    std::vector<int> remap(m.r, -1);
    int next = 0;
    for (int g : raw)
        if (remap[g] < 0) remap[g] = next++;
    for (int& g : raw) g = remap[g];
    return GroupStructure(raw);
}

StabilityReport stability_analysis(const Dataset& d, const GroupStructure& groups,
                                   const std::vector<double>& taus,
                                   const std::vector<ModelConfig>& models,
                                   int repetitions, const SplitSpec& split_sizes,
                                   std::uint64_t base_seed, const SolverOptions& opts,
                                   unsigned num_threads) {
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (taus.empty() || models.empty())
        throw std::invalid_argument("need at least one tau and one model");

    const auto p = d.p();
    const std::size_t nm = models.size(), nt = taus.size();
    // per (rep, model, tau): selected support as 0/1
    std::vector<Matrix> counts(nm, Matrix::Zero(Eigen::Index(nt), p));
    std::vector<int> failures_by_rep(std::size_t(repetitions), 0);
    std::mutex agg;

    parallel_for(std::size_t(repetitions), num_threads, [&](std::size_t r) {
        SplitSpec sp = split_sizes;
        sp.seed = base_seed + r;
        Split parts = split(d, sp);
        Matrix local = Matrix::Zero(Eigen::Index(nm * nt), p);
        int fails = 0;
        for (std::size_t mi = 0; mi < nm; ++mi) {
            for (std::size_t ti = 0; ti < nt; ++ti) {
                try {
                    QuantileLevel q(taus[ti]);
                    Grid g = models[mi].grid;
                    if (g.lambdas.empty()) {
                        double lmax = lambda_max(parts.train, q);
                        if (lmax <= 0.0) lmax = 1.0;
                        for (int i = 0; i < models[mi].n_lambdas; ++i)
                            g.lambdas.push_back(
                                lmax *
                                std::pow(models[mi].lambda_min_ratio,
                                         double(i) /
                                             std::max(1, models[mi].n_lambdas - 1)));
                    }
                    GridSearchResult gs =
                        grid_search(parts.train, parts.val, q, groups, g, opts, 1);
                    for (Eigen::Index j = 0; j < p; ++j)
                        if (std::abs(gs.best_fit.beta_hat(j)) > 1e-6)
                            local(Eigen::Index(mi * nt + ti), j) = 1.0;
                } catch (const std::exception&) {
                    ++fails;
                }
            }
        }
        std::lock_guard<std::mutex> lock(agg);
        for (std::size_t mi = 0; mi < nm; ++mi)
            for (std::size_t ti = 0; ti < nt; ++ti)
                counts[mi].row(Eigen::Index(ti)) += local.row(Eigen::Index(mi * nt + ti));
        failures_by_rep[r] = fails;
    });

    StabilityReport rep;
    rep.taus = taus;
    rep.repetitions = repetitions;
    for (const auto& m : models) rep.model_names.push_back(m.name);
    for (int f : failures_by_rep) rep.failures += f;
    rep.selection_probability.resize(nm);
    rep.thresholded.resize(nm);
    rep.cross_tau_intersection.resize(nm);
    for (std::size_t mi = 0; mi < nm; ++mi) {
        rep.selection_probability[mi].resize(nt);
        rep.thresholded[mi].resize(nt);
        for (std::size_t ti = 0; ti < nt; ++ti) {
            Vector prob = counts[mi].row(Eigen::Index(ti)) / double(repetitions);
            for (Eigen::Index j = 0; j < p; ++j)
                if (prob(j) >= rep.probability_threshold)
                    rep.thresholded[mi][ti].push_back(int(j));
            rep.selection_probability[mi][ti] = std::move(prob);
        }
        // intersection across quantile levels
        std::vector<int> common = rep.thresholded[mi][0];
        for (std::size_t ti = 1; ti < nt; ++ti) {
            std::vector<int> next;
            std::set_intersection(common.begin(), common.end(),
                                  rep.thresholded[mi][ti].begin(),
                                  rep.thresholded[mi][ti].end(),
                                  std::back_inserter(next));
            common = std::move(next);
        }
        rep.cross_tau_intersection[mi] = std::move(common);
    }
    return rep;
}

}  // namespace asgl
