#include "asgl/qr_core.hpp"

#include <cmath>
#include <stdexcept>

namespace asgl {

QuantileLevel::QuantileLevel(double t) : tau(t) {
    if (!(t > 0.0 && t < 1.0))
        throw std::invalid_argument("quantile level must lie in (0,1)");
}

PenaltySpec::PenaltySpec(double lambda_, double alpha_, GroupStructure groups_)
    : lambda(lambda_),
      alpha(alpha_),
      w(Vector::Ones(groups_.p())),
      v(Vector::Ones(groups_.K)),
      groups(std::move(groups_)) {
    validate();
}

PenaltySpec::PenaltySpec(double lambda_, double alpha_, Vector w_, Vector v_,
                         GroupStructure groups_)
    : lambda(lambda_),
      alpha(alpha_),
      w(std::move(w_)),
      v(std::move(v_)),
      groups(std::move(groups_)) {
    validate();
}

void PenaltySpec::validate() const {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("alpha must lie in [0,1]");
    if (w.size() != groups.p())
        throw std::invalid_argument("w must have one entry per variable");
    if (v.size() != groups.K)
        throw std::invalid_argument("v must have one entry per group");
    if (!w.allFinite() || !v.allFinite() || w.minCoeff() < 0.0 || v.minCoeff() < 0.0)
        throw std::invalid_argument("weights must be finite and nonnegative");
}

double check_loss(double u, const QuantileLevel& tau) {
    return u >= 0.0 ? tau.tau * u : (tau.tau - 1.0) * u;
}

double qr_risk(const Vector& beta, const Dataset& d, const QuantileLevel& tau) {
    if (beta.size() != d.p()) throw std::invalid_argument("beta dimension mismatch");
    Vector r = d.y - d.X * beta;
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) s += check_loss(r(i), tau);
    return s / double(d.n());
}

double penalty_value(const Vector& beta, const PenaltySpec& spec) {
    if (beta.size() != spec.groups.p())
        throw std::invalid_argument("beta dimension mismatch");
    double l1 = (spec.w.array() * beta.array().abs()).sum();
    double gl = 0.0;
    Vector group_sq = Vector::Zero(spec.groups.K);
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        group_sq(spec.groups.group_of[j]) += beta(j) * beta(j);
    for (int l = 0; l < spec.groups.K; ++l)
        gl += std::sqrt(double(spec.groups.sizes[l])) * spec.v(l) *
              std::sqrt(group_sq(l));
    return spec.alpha * spec.lambda * l1 + (1.0 - spec.alpha) * spec.lambda * gl;
}

double objective(const Vector& beta, const Dataset& d, const QuantileLevel& tau,
                 const PenaltySpec& spec) {
    return qr_risk(beta, d, tau) + penalty_value(beta, spec);
}

double prox_check(double v, double sigma, const QuantileLevel& tau) {
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
    if (v > sigma * tau.tau) return v - sigma * tau.tau;
    if (v < -sigma * (1.0 - tau.tau)) return v + sigma * (1.0 - tau.tau);
    return 0.0;
}

double soft_threshold(double x, double t) {
    if (x > t) return x - t;
    if (x < -t) return x + t;
    return 0.0;
}

Vector prox_asgl(const Vector& v, const PenaltySpec& spec, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
    if (v.size() != spec.groups.p())
        throw std::invalid_argument("vector dimension mismatch");
    Vector out(v.size());
    for (Eigen::Index j = 0; j < v.size(); ++j)
        out(j) = soft_threshold(v(j), step * spec.alpha * spec.lambda * spec.w(j));
    // block shrinkage per group
    Vector group_sq = Vector::Zero(spec.groups.K);
    for (Eigen::Index j = 0; j < v.size(); ++j)
        group_sq(spec.groups.group_of[j]) += out(j) * out(j);
    for (int l = 0; l < spec.groups.K; ++l) {
        double thr = step * (1.0 - spec.alpha) * spec.lambda *
                     std::sqrt(double(spec.groups.sizes[l])) * spec.v(l);
        if (thr <= 0.0) continue;
        double nrm = std::sqrt(group_sq(l));
        double scale = nrm > thr ? 1.0 - thr / nrm : 0.0;
        for (Eigen::Index j = 0; j < v.size(); ++j)
            if (spec.groups.group_of[j] == l) out(j) *= scale;
    }
    return out;
}

}  // namespace asgl
