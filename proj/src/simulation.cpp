#include "asgl/simulation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "asgl/parallel.hpp"

namespace asgl {

namespace {

Vector block_betas(int K, int group_size, int active_groups, int active_per_group) {
    Vector beta = Vector::Zero(Eigen::Index(K) * group_size);
    for (int l = 0; l < active_groups; ++l)
        for (int j = 0; j < active_per_group; ++j)
            beta(Eigen::Index(l) * group_size + j) = double(j + 1);
    return beta;
}

double student_t(std::mt19937_64& rng, std::normal_distribution<double>& gauss,
                 double df) {
    double z = gauss(rng);
    double chi2 = 0.0;
    for (int k = 0; k < int(df); ++k) {
        double g = gauss(rng);
        chi2 += g * g;
    }
    return z / std::sqrt(chi2 / df);
}

}  // namespace

Scenario Scenario::by_name(const std::string& name) {
    Scenario s;
    s.name = name;
    s.sizes = {100, 100, 5000, 0};
    if (name == "sim1_p225") {
        s.K = 15;
        s.group_size = 15;
        s.beta_true = block_betas(15, 15, 7, 8);
    } else if (name == "sim1_p625") {
        s.K = 25;
        s.group_size = 25;
        s.beta_true = block_betas(25, 25, 7, 8);
    } else if (name == "sim2_p225") {
        s.K = 15;
        s.group_size = 15;
        s.beta_true = block_betas(15, 15, 3, 15);
    } else if (name == "sim2_p625") {
        s.K = 25;
        s.group_size = 25;
        s.beta_true = block_betas(25, 25, 3, 25);
    } else if (name == "sim3_sparse") {
        s.K = 10;
        s.group_size = 10;
        s.beta_true = block_betas(10, 10, 5, 6);
        s.sizes = {200, 200, 5000, 0};
    } else if (name == "sim3_dense") {
        s.K = 10;
        s.group_size = 10;
        s.beta_true = block_betas(10, 10, 3, 10);
        s.sizes = {200, 200, 5000, 0};
    } else {
        throw std::invalid_argument("unknown scenario: " + name);
    }
    return s;
}

std::pair<Dataset, Vector> generate(const Scenario& s, std::uint64_t seed) {
    if (s.K < 1 || s.group_size < 1)
        throw std::invalid_argument("scenario needs K >= 1 and group_size >= 1");
    if (s.beta_true.size() != Eigen::Index(s.K) * s.group_size)
        throw std::invalid_argument("beta_true length must equal K * group_size");
    if (!(s.rho_within >= 0.0 && s.rho_within < 1.0))
        throw std::invalid_argument("rho_within must lie in [0,1)");
    const auto n = s.sizes.n_train + s.sizes.n_val + s.sizes.n_test;
    const int p = s.p();

    // Cholesky factor of the within-group covariance (1-rho) I + rho 11'
    const int m = s.group_size;
    Matrix C = Matrix::Constant(m, m, s.rho_within);
    C.diagonal().setOnes();
    Matrix L = C.llt().matrixL();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Matrix X(n, p);
    Vector z(m);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int l = 0; l < s.K; ++l) {
            for (int j = 0; j < m; ++j) z(j) = gauss(rng);
            X.row(i).segment(Eigen::Index(l) * m, m) = (L * z).transpose();
        }
    }
    Vector eps(n);
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = student_t(rng, gauss, s.noise_df);
    Vector y = X * s.beta_true + eps;
    return {Dataset(std::move(X), std::move(y)), s.beta_true};
}

MetricsReport metrics(const Vector& beta_hat, const Vector& beta_true, double Et,
                      double zero_tol) {
    if (beta_hat.size() != beta_true.size())
        throw std::invalid_argument("metrics: length mismatch");
    MetricsReport r;
    r.dist = (beta_hat - beta_true).norm();
    r.Et = Et;
    Eigen::Index tp = 0, fn = 0, tn = 0, fp = 0;
    for (Eigen::Index j = 0; j < beta_hat.size(); ++j) {
        bool sel = std::abs(beta_hat(j)) > zero_tol;
        bool truth = beta_true(j) != 0.0;
        if (truth)
            (sel ? tp : fn)++;
        else
            (sel ? fp : tn)++;
    }
    r.tpr = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 1.0;
    r.tnr = (tn + fp) > 0 ? double(tn) / double(tn + fp) : 1.0;
    r.csr = double(tp + tn) / double(beta_hat.size());
    return r;
}

namespace {

std::vector<double> default_alphas() {
    std::vector<double> a;
    for (int i = 0; i < 10; ++i) a.push_back(0.05 + 0.1 * i);
    return a;
}

}  // namespace

ModelConfig lasso_model() {
    ModelConfig m;
    m.name = "lasso";
    m.grid.alphas = {1.0};
    return m;
}

ModelConfig sgl_model(std::vector<double> alphas) {
    ModelConfig m;
    m.name = "sgl";
    m.grid.alphas = alphas.empty() ? default_alphas() : std::move(alphas);
    return m;
}

ModelConfig asgl_model(WeightKind kind, std::vector<double> alphas,
                       std::vector<double> gammas) {
    ModelConfig m;
    m.name = "asgl_" + to_string(kind);
    m.grid.alphas = alphas.empty() ? default_alphas() : std::move(alphas);
    m.grid.schemes = {kind};
    if (gammas.empty()) gammas = {0.0, 0.5, 1.0, 1.5, 2.0};
    m.grid.gamma1s = gammas;
    m.grid.gamma2s = std::move(gammas);
    return m;
}

ModelConfig alsgl_model(WeightKind kind, std::vector<double> alphas,
                        std::vector<double> gammas) {
    ModelConfig m = asgl_model(kind, std::move(alphas), std::move(gammas));
    m.name = "alsgl_" + to_string(kind);
    m.grid.group_weights = false;
    return m;
}

ExperimentResult run_experiment(const Scenario& s,
                                const std::vector<ModelConfig>& models,
                                int repetitions, std::uint64_t base_seed, double tau,
                                const SolverOptions& opts, unsigned num_threads) {
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (models.empty()) throw std::invalid_argument("no models given");
    QuantileLevel q(tau);
    GroupStructure groups = s.groups();

    const std::size_t n_jobs = std::size_t(repetitions) * models.size();
    std::vector<RepetitionRecord> rows(n_jobs);
    parallel_for(std::size_t(repetitions), num_threads, [&](std::size_t r) {
        auto [data, beta_true] = generate(s, base_seed + r);
        SplitSpec sp = s.sizes;
        sp.seed = base_seed + r;
        Split parts = split(data, sp);
        for (std::size_t mi = 0; mi < models.size(); ++mi) {
            RepetitionRecord& rec = rows[r * models.size() + mi];
            rec.repetition = int(r);
            rec.model = models[mi].name;
            try {
                Grid g = models[mi].grid;
                if (g.lambdas.empty()) {
                    double lmax = lambda_max(parts.train, q);
                    if (lmax <= 0.0) lmax = 1.0;
                    for (int i = 0; i < models[mi].n_lambdas; ++i)
                        g.lambdas.push_back(
                            lmax * std::pow(models[mi].lambda_min_ratio,
                                            double(i) /
                                                std::max(1, models[mi].n_lambdas - 1)));
                }
                GridSearchResult gs =
                    grid_search(parts.train, parts.val, q, groups, g, opts, 1);
                double Et = quantile_error(gs.best_fit.beta_hat, parts.test, q);
                rec.m = metrics(gs.best_fit.beta_hat, beta_true, Et);
                rec.selected = gs.best_combo;
                rec.ok = true;
            } catch (const std::exception& e) {
                rec.ok = false;
                rec.error = e.what();
            }
        }
    });

    ExperimentResult out;
    out.rows = std::move(rows);
    for (const auto& mc : models) {
        ModelSummary sum;
        sum.model = mc.name;
        std::vector<MetricsReport> kept;
        for (const auto& rec : out.rows)
            if (rec.model == mc.name) {
                if (rec.ok)
                    kept.push_back(rec.m);
                else
                    ++sum.failures;
            }
        sum.repetitions_used = int(kept.size());
        auto accum = [&](auto field) {
            double mean = 0.0;
            for (const auto& k : kept) mean += k.*field;
            mean /= std::max<std::size_t>(1, kept.size());
            double var = 0.0;
            for (const auto& k : kept) var += (k.*field - mean) * (k.*field - mean);
            double sd = kept.size() > 1 ? std::sqrt(var / double(kept.size() - 1)) : 0.0;
            return std::make_pair(mean, sd);
        };
        std::tie(sum.mean.dist, sum.sd.dist) = accum(&MetricsReport::dist);
        std::tie(sum.mean.Et, sum.sd.Et) = accum(&MetricsReport::Et);
        std::tie(sum.mean.csr, sum.sd.csr) = accum(&MetricsReport::csr);
        std::tie(sum.mean.tpr, sum.sd.tpr) = accum(&MetricsReport::tpr);
        std::tie(sum.mean.tnr, sum.sd.tnr) = accum(&MetricsReport::tnr);
        out.summaries.push_back(std::move(sum));
    }
    return out;
}

}  // namespace asgl
