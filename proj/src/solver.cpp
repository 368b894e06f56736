#include "asgl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace asgl {

namespace {

constexpr double kResidualZeroTol = 1e-9;
constexpr int kInnerSteps = 8;  // prox-gradient steps per beta-update

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    void add_point(double x) {
        lo += x;
        hi += x;
    }
    void add_span(double a, double b) {  // adds [min(a,b), max(a,b)]
        lo += std::min(a, b);
        hi += std::max(a, b);
    }
    double dist_to_zero() const {
        if (lo <= 0.0 && 0.0 <= hi) return 0.0;
        return std::min(std::abs(lo), std::abs(hi));
    }
};

// Per-coordinate subgradient interval of the risk at beta (residuals given).
void risk_subgradient(const Matrix& X, const Vector& r, double tau,
                      std::vector<Interval>& out) {
    const auto n = X.rows();
    const auto p = X.cols();
    out.assign(p, Interval{});
    const double inv_n = 1.0 / double(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(r(i)) <= kResidualZeroTol) {
            for (Eigen::Index j = 0; j < p; ++j)
                out[j].add_span(-X(i, j) * (tau - 1.0) * inv_n,
                                -X(i, j) * tau * inv_n);
        } else {
            double s = (tau - (r(i) < 0.0 ? 1.0 : 0.0)) * inv_n;
            for (Eigen::Index j = 0; j < p; ++j) out[j].add_point(-X(i, j) * s);
        }
    }
}

// The per-coordinate interval residual treats the subgradient choice of each
// zero-residual row independently per coordinate, which is only a necessary
// condition: near-interpolating vertices can straddle zero in every coordinate
// separately with no common choice. This refines the certificate by minimizing
// the coupled residual over the zero rows' subgradients s_i in [tau-1, tau]
// (convex in s, solved by projected gradient); any feasible s yields a sound
// upper bound on the true KKT residual.
double coupled_kkt(const Vector& beta, const Dataset& d, const QuantileLevel& tau,
                   const PenaltySpec& spec, double stop_at) {
    const auto n = d.n();
    const auto p = d.p();
    Vector r = d.y - d.X * beta;
    std::vector<Eigen::Index> zero_rows;
    for (Eigen::Index i = 0; i < n; ++i)
        if (std::abs(r(i)) <= kResidualZeroTol) zero_rows.push_back(i);

    Vector group_norm = Vector::Zero(spec.groups.K);
    for (Eigen::Index j = 0; j < p; ++j)
        group_norm(spec.groups.group_of[j]) += beta(j) * beta(j);
    group_norm = group_norm.array().sqrt();

    // fixed part q_j and per-coordinate slack h_j from the penalty boxes
    Vector q = Vector::Zero(p), h = Vector::Zero(p);
    const double inv_n = 1.0 / double(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(r(i)) <= kResidualZeroTol) continue;
        double s = (tau.tau - (r(i) < 0.0 ? 1.0 : 0.0)) * inv_n;
        q -= d.X.row(i).transpose() * s;
    }
    for (Eigen::Index j = 0; j < p; ++j) {
        const double a = spec.alpha * spec.lambda * spec.w(j);
        const int l = spec.groups.group_of[j];
        const double t = (1.0 - spec.alpha) * spec.lambda *
                         std::sqrt(double(spec.groups.sizes[l])) * spec.v(l);
        if (beta(j) != 0.0)
            q(j) += a * (beta(j) > 0.0 ? 1.0 : -1.0) + t * beta(j) / group_norm(l);
        else
            h(j) = a + (group_norm(l) > 0.0 ? 0.0 : t);
    }

    const auto m = Eigen::Index(zero_rows.size());
    auto residual_at = [&](const Vector& s) {
        Vector g = q;
        for (Eigen::Index k = 0; k < m; ++k)
            g -= d.X.row(zero_rows[std::size_t(k)]).transpose() * (s(k) * inv_n);
        double worst = 0.0;
        for (Eigen::Index j = 0; j < p; ++j)
            worst = std::max(worst, std::max(0.0, std::abs(g(j)) - h(j)));
        return worst;
    };
    if (m == 0) return residual_at(Vector());

    Matrix B(p, m);  // coefficient of s_k in coordinate j
    for (Eigen::Index k = 0; k < m; ++k)
        B.col(k) = -d.X.row(zero_rows[std::size_t(k)]).transpose() * inv_n;

    const double lo = tau.tau - 1.0, hi = tau.tau;
    Vector s = Vector::Constant(m, 0.5 * (lo + hi));
    double L = std::max(1e-12, 2.0 * spectral_norm(B) * spectral_norm(B));
    double best = residual_at(s);
    Vector prev = s, z = s;
    double t_prev = 1.0;
    for (int it = 0; it < 2000 && best > stop_at; ++it) {
        Vector g = q + B * z;
        // gradient of sum_j soft(g_j, h_j)^2
        Vector phi(p);
        for (Eigen::Index j = 0; j < p; ++j)
            phi(j) = soft_threshold(g(j), h(j));
        Vector grad = 2.0 * (B.transpose() * phi);
        Vector next = (z - grad / L).cwiseMax(lo).cwiseMin(hi);
        double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
        z = next + ((t_prev - 1.0) / t_next) * (next - prev);
        prev = next;
        t_prev = t_next;
        best = std::min(best, residual_at(next));
    }
    return best;
}

// Optima sit at vertices interpolating as many rows as there are active
// coordinates; ADMM only reaches such points asymptotically, so the interval
// certificate can stall. Snap the candidate onto the nearest vertex: solve
// for the active coordinates through the rows with the smallest residuals.
Vector polish_vertex(const Dataset& d, const Vector& beta) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (beta(j) != 0.0) active.push_back(j);
    const auto m = Eigen::Index(active.size());
    if (m == 0 || m > d.n()) return beta;

    Vector r = d.y - d.X * beta;
    std::vector<Eigen::Index> rows(std::size_t(d.n()));
    for (Eigen::Index i = 0; i < d.n(); ++i) rows[std::size_t(i)] = i;
    std::partial_sort(rows.begin(), rows.begin() + m, rows.end(),
                      [&](Eigen::Index a, Eigen::Index b) {
                          return std::abs(r(a)) < std::abs(r(b));
                      });

    Matrix A(m, m);
    Vector b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j)
            A(i, j) = d.X(rows[std::size_t(i)], active[std::size_t(j)]);
        b(i) = d.y(rows[std::size_t(i)]);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    if (qr.rank() < m) return beta;
    Vector ba = qr.solve(b);
    if (!ba.allFinite()) return beta;
    Vector out = Vector::Zero(beta.size());
    for (Eigen::Index j = 0; j < m; ++j) out(active[std::size_t(j)]) = ba(j);
    return out;
}

}  // namespace

double spectral_norm(const Matrix& X, int max_iter, double tol) {
    Vector v = Vector::Ones(X.cols()).normalized();
    double sigma = 0.0;
    for (int k = 0; k < max_iter; ++k) {
        Vector u = X.transpose() * (X * v);
        double nrm = u.norm();
        if (nrm == 0.0) return 0.0;
        u /= nrm;
        double s = std::sqrt(nrm);
        if (std::abs(s - sigma) <= tol * std::max(1.0, s)) {
            v = u;
            sigma = s;
            break;
        }
        sigma = s;
        v = u;
    }
    return sigma;
}

double kkt_residual(const Vector& beta, const Dataset& d, const QuantileLevel& tau,
                    const PenaltySpec& spec) {
    if (beta.size() != d.p() || beta.size() != spec.groups.p())
        throw std::invalid_argument("dimension mismatch in kkt_residual");
    Vector r = d.y - d.X * beta;
    std::vector<Interval> sub;
    risk_subgradient(d.X, r, tau.tau, sub);

    Vector group_norm = Vector::Zero(spec.groups.K);
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        group_norm(spec.groups.group_of[j]) += beta(j) * beta(j);
    group_norm = group_norm.array().sqrt();

    double worst = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        Interval s = sub[j];
        const double a = spec.alpha * spec.lambda * spec.w(j);
        if (beta(j) != 0.0)
            s.add_point(a * (beta(j) > 0.0 ? 1.0 : -1.0));
        else
            s.add_span(-a, a);
        const int l = spec.groups.group_of[j];
        const double t = (1.0 - spec.alpha) * spec.lambda *
                         std::sqrt(double(spec.groups.sizes[l])) * spec.v(l);
        if (group_norm(l) > 0.0)
            s.add_point(t * beta(j) / group_norm(l));
        else
            s.add_span(-t, t);
        worst = std::max(worst, s.dist_to_zero());
    }
    return worst;
}

double lambda_max(const Dataset& d, const QuantileLevel& tau, const Vector& w) {
    if (w.size() != d.p()) throw std::invalid_argument("weight dimension mismatch");
    std::vector<Interval> sub;
    risk_subgradient(d.X, d.y, tau.tau, sub);
    double lmax = 0.0;
    for (Eigen::Index j = 0; j < d.p(); ++j) {
        if (w(j) <= 1e-12) continue;  // unpenalized coordinate
        lmax = std::max(lmax, sub[j].dist_to_zero() / w(j));
    }
    return lmax;
}

double lambda_max(const Dataset& d, const QuantileLevel& tau) {
    return lambda_max(d, tau, Vector::Ones(d.p()));
}

FitResult fit(const Dataset& d, const QuantileLevel& tau, const PenaltySpec& spec,
              const SolverOptions& opts) {
    if (d.p() != spec.groups.p())
        throw std::invalid_argument("dataset and penalty dimension mismatch");
    if (opts.max_iter < 1 || !(opts.tol_kkt > 0.0) || !(opts.rho > 0.0))
        throw std::invalid_argument("invalid solver options");
    const auto n = d.n();
    const auto p = d.p();

    Vector beta = Vector::Zero(p);
    if (opts.beta0) {
        if (opts.beta0->size() != p)
            throw std::invalid_argument("warm-start dimension mismatch");
        beta = *opts.beta0;
    }

    const double L = std::max(spectral_norm(d.X), 1e-12);
    // start the penalty so the check-prox threshold sigma = 1/(n rho) sits at
    // the response scale; residual balancing refines it from there
    const double y_scale =
        std::max(1e-3, std::sqrt((d.y.array() - d.y.mean()).square().sum() /
                                 double(std::max<Eigen::Index>(1, n - 1))));
    double rho = opts.rho / (double(n) * y_scale);
    double sigma = 1.0 / (double(n) * rho);
    double mu = 1.0 / (rho * L * L);

    Vector u = Vector::Zero(n);          // scaled dual
    Vector r = d.y - d.X * beta;         // splitting variable
    Vector r_prev = r;

    FitResult best;
    best.beta_hat = beta;
    best.objective = objective(beta, d, tau, spec);
    best.kkt_residual = kkt_residual(beta, d, tau, spec);
    best.iterations = 0;
    best.converged = best.kkt_residual <= opts.tol_kkt &&
                     coupled_kkt(beta, d, tau, spec, opts.tol_kkt) <= opts.tol_kkt;
    if (best.converged) return best;

    for (int k = 1; k <= opts.max_iter; ++k) {
        Vector xb = d.X * beta;
        // r-update: elementwise prox of the check loss
        Vector target = d.y - xb - u;
        for (Eigen::Index i = 0; i < n; ++i) r(i) = prox_check(target(i), sigma, tau);
        // beta-update: a few accelerated prox-gradient steps on the
        // quadratic subproblem min penalty + rho/2 ||X b + r - y + u||^2
        {
            Vector c = r - d.y + u;
            Vector prev = beta;
            double t_prev = 1.0;
            Vector z = beta;
            for (int s = 0; s < kInnerSteps; ++s) {
                Vector grad = rho * (d.X.transpose() * (d.X * z + c));
                Vector next = prox_asgl(z - mu * grad, spec, mu);
                double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
                z = next + ((t_prev - 1.0) / t_next) * (next - prev);
                prev = next;
                t_prev = t_next;
            }
            beta = prev;
        }
        // dual update
        Vector primal = d.X * beta + r - d.y;
        u += primal;

        if (k % opts.check_every == 0 || k == opts.max_iter) {
            double res = kkt_residual(beta, d, tau, spec);
            double obj = objective(beta, d, tau, spec);
            Vector cert = beta;  // candidate carrying the certificate
            Vector cand = polish_vertex(d, beta);
            if (cand != beta) {
                double cobj = objective(cand, d, tau, spec);
                if (cobj <= obj) {
                    double cres = kkt_residual(cand, d, tau, spec);
                    if (cres < res) {  // polished vertex certifies better
                        cert = std::move(cand);
                        res = cres;
                        obj = cobj;
                    }
                }
            }
            if (obj < best.objective ||
                (res < best.kkt_residual && obj <= best.objective + 1e-12)) {
                best.beta_hat = cert;
                best.objective = obj;
                best.kkt_residual = res;
            }
            best.iterations = k;
            if (res <= opts.tol_kkt &&
                coupled_kkt(cert, d, tau, spec, opts.tol_kkt) <= opts.tol_kkt) {
                best.beta_hat = cert;
                best.objective = obj;
                best.kkt_residual = res;
                best.converged = true;
                return best;
            }
            if (opts.adaptive_rho) {
                double pr = primal.norm();
                double du = (rho * d.X.transpose() * (r - r_prev)).norm();
                if (pr > 10.0 * du) {
                    rho *= 2.0;
                    u /= 2.0;
                } else if (du > 10.0 * pr) {
                    rho /= 2.0;
                    u *= 2.0;
                }
                sigma = 1.0 / (double(n) * rho);
                mu = 1.0 / (rho * L * L);
            }
        }
        r_prev = r;
    }
    best.iterations = opts.max_iter;
    best.converged = false;
    return best;
}

std::pair<FitResult, double> fit_with_intercept(const Dataset& d,
                                                const QuantileLevel& tau,
                                                const PenaltySpec& spec,
                                                const SolverOptions& opts) {
    const auto p = d.p();
    Matrix Xa(d.n(), p + 1);
    Xa.leftCols(p) = d.X;
    Xa.col(p).setOnes();
    Dataset da(std::move(Xa), d.y);

    std::vector<int> g = spec.groups.group_of;
    g.push_back(spec.groups.K);  // intercept gets its own group
    GroupStructure ga(std::move(g));
    Vector w(p + 1), v(spec.groups.K + 1);
    w.head(p) = spec.w;
    w(p) = 0.0;  // unpenalized
    v.head(spec.groups.K) = spec.v;
    v(spec.groups.K) = 0.0;
    PenaltySpec sa(spec.lambda, spec.alpha, std::move(w), std::move(v), std::move(ga));

    SolverOptions oa = opts;
    if (oa.beta0) {
        Vector b0(p + 1);
        b0.head(p) = *oa.beta0;
        b0(p) = 0.0;
        oa.beta0 = b0;
    }
    FitResult full = fit(da, tau, sa, oa);
    double intercept = full.beta_hat(p);
    FitResult out = full;
    out.beta_hat = full.beta_hat.head(p);
    return {out, intercept};
}

}  // namespace asgl
