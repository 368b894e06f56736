#include "asgl/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asgl/parallel.hpp"

namespace asgl {

void Grid::validate() const {
    if (lambdas.empty() || alphas.empty() || gamma1s.empty() || gamma2s.empty() ||
        schemes.empty())
        throw std::invalid_argument("grid lists must be nonempty");
    for (std::size_t i = 1; i < lambdas.size(); ++i)
        if (lambdas[i] >= lambdas[i - 1])
            throw std::invalid_argument("lambdas must be sorted decreasing");
    for (double l : lambdas)
        if (!(l > 0.0)) throw std::invalid_argument("lambdas must be positive");
    for (double a : alphas)
        if (!(a >= 0.0 && a <= 1.0))
            throw std::invalid_argument("alphas must lie in [0,1]");
}

Grid default_grid(const Dataset& train, const QuantileLevel& tau) {
    Grid g;
    double lmax = lambda_max(train, tau);
    if (lmax <= 0.0) lmax = 1.0;
    for (int i = 0; i < 20; ++i)
        g.lambdas.push_back(lmax * std::pow(1e-3, double(i) / 19.0));
    for (int i = 0; i < 10; ++i) g.alphas.push_back(0.05 + 0.1 * i);
    g.gamma1s = {0.0, 0.5, 1.0, 1.5, 2.0};
    g.gamma2s = {0.0, 0.5, 1.0, 1.5, 2.0};
    return g;
}

double quantile_error(const Vector& beta, const Dataset& d, const QuantileLevel& tau) {
    if (d.n() < 1) throw std::invalid_argument("empty dataset");
    return qr_risk(beta, d, tau);
}

namespace {

// true if a is preferred over b at equal validation error
bool tie_preferred(const GridCombo& a, const GridCombo& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    if (a.alpha != b.alpha) return a.alpha > b.alpha;
    if (a.gamma1 != b.gamma1) return a.gamma1 < b.gamma1;
    return a.gamma2 < b.gamma2;
}

struct Chain {
    WeightKind scheme;
    double gamma1, gamma2;
    double alpha;
    std::size_t weight_job;
};

// (scheme, gamma1, gamma2) combinations that yield distinct weights
std::vector<std::tuple<WeightKind, double, double>> weight_jobs(const Grid& grid) {
    std::vector<std::tuple<WeightKind, double, double>> jobs;
    for (WeightKind s : grid.schemes) {
        if (s == WeightKind::none) {
            jobs.emplace_back(s, 0.0, 0.0);
            continue;
        }
        for (double g1 : grid.gamma1s) {
            if (grid.group_weights) {
                for (double g2 : grid.gamma2s) jobs.emplace_back(s, g1, g2);
            } else {
                jobs.emplace_back(s, g1, 0.0);
            }
        }
    }
    return jobs;
}

}  // namespace

GridSearchResult grid_search(const Dataset& train, const Dataset& val,
                             const QuantileLevel& tau, const GroupStructure& groups,
                             const Grid& grid, const SolverOptions& opts,
                             unsigned num_threads) {
    grid.validate();
    if (val.n() < 1) throw std::invalid_argument("empty validation dataset");

    auto jobs = weight_jobs(grid);
    std::vector<Weights> weights(jobs.size());
    parallel_for(jobs.size(), num_threads, [&](std::size_t i) {
        auto [kind, g1, g2] = jobs[i];
        WeightScheme scheme;
        scheme.kind = kind;
        scheme.gamma1 = g1;
        scheme.gamma2 = g2;
        scheme.variance_threshold_pct = grid.variance_threshold_pct;
        weights[i] = compute_weights(train, tau, groups, scheme, opts);
        if (!grid.group_weights) weights[i].v.setOnes();
    });

    std::vector<Chain> chains;
    for (std::size_t i = 0; i < jobs.size(); ++i)
        for (double a : grid.alphas)
            chains.push_back(
                {std::get<0>(jobs[i]), std::get<1>(jobs[i]), std::get<2>(jobs[i]), a, i});

    const std::size_t nl = grid.lambdas.size();
    std::vector<GridRow> rows(chains.size() * nl);
    parallel_for(chains.size(), num_threads, [&](std::size_t c) {
        const Chain& ch = chains[c];
        SolverOptions o = opts;
        o.beta0.reset();
        for (std::size_t li = 0; li < nl; ++li) {
            PenaltySpec spec(grid.lambdas[li], ch.alpha, weights[ch.weight_job].w,
                             weights[ch.weight_job].v, groups);
            FitResult fr = fit(train, tau, spec, o);
            o.beta0 = fr.beta_hat;  // warm start down the path
            GridRow& row = rows[c * nl + li];
            row.combo = {grid.lambdas[li], ch.alpha, ch.gamma1, ch.gamma2, ch.scheme};
            row.val_error = quantile_error(fr.beta_hat, val, tau);
            row.converged = fr.converged;
        }
    });

    std::size_t n_conv = 0;
    for (const auto& r : rows) n_conv += r.converged ? 1 : 0;
    if (n_conv == 0)
        throw std::runtime_error("grid_search: no combination converged (" +
                                 std::to_string(rows.size()) + " fits attempted)");

    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].val_error < rows[best].val_error ||
            (rows[i].val_error == rows[best].val_error &&
             tie_preferred(rows[i].combo, rows[best].combo)))
            best = i;
    }

    GridSearchResult res;
    res.best_combo = rows[best].combo;
    res.best_val_error = rows[best].val_error;
    res.table = std::move(rows);

    // refit the winning chain exactly as it was evaluated
    const Chain& ch = chains[best / nl];
    res.best_weights = weights[ch.weight_job];
    SolverOptions o = opts;
    o.beta0.reset();
    for (std::size_t li = 0; li <= best % nl; ++li) {
        PenaltySpec spec(grid.lambdas[li], ch.alpha, res.best_weights.w,
                         res.best_weights.v, groups);
        res.best_fit = fit(train, tau, spec, o);
        o.beta0 = res.best_fit.beta_hat;
    }
    return res;
}

}  // namespace asgl
