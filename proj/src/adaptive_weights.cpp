#include "asgl/adaptive_weights.hpp"

#include <cmath>
#include <stdexcept>

namespace asgl {

WeightKind weight_kind_from_string(const std::string& s) {
    if (s == "pca_d") return WeightKind::pca_d;
    if (s == "pca_1") return WeightKind::pca_1;
    if (s == "pls_d") return WeightKind::pls_d;
    if (s == "pls_1") return WeightKind::pls_1;
    if (s == "unpenalized") return WeightKind::unpenalized;
    if (s == "none") return WeightKind::none;
    throw std::invalid_argument("unknown weight scheme: " + s);
}

std::string to_string(WeightKind k) {
    switch (k) {
        case WeightKind::pca_d: return "pca_d";
        case WeightKind::pca_1: return "pca_1";
        case WeightKind::pls_d: return "pls_d";
        case WeightKind::pls_1: return "pls_1";
        case WeightKind::unpenalized: return "unpenalized";
        case WeightKind::none: return "none";
    }
    return "none";
}

namespace {

double capped_reciprocal_power(double x, double gamma, double cap) {
    if (gamma == 0.0) return 1.0;
    double a = std::abs(x);
    if (a <= 0.0) return cap;
    return std::min(std::pow(a, -gamma), cap);
}

void validate_scheme(const WeightScheme& s) {
    if (!(s.gamma1 >= 0.0) || !(s.gamma2 >= 0.0))
        throw std::invalid_argument("gamma constants must be >= 0");
    if (!(s.weight_cap > 0.0)) throw std::invalid_argument("weight_cap must be > 0");
}

// Unpenalized QR fit in the reduced space spanned by the component columns,
// mapped back to the original p coordinates.
Vector backprojected_estimate(const Dataset& train, const QuantileLevel& tau,
                              const Matrix& components, const SolverOptions& opts) {
    Matrix Z = train.X * components;
    Dataset reduced(std::move(Z), train.y);
    PenaltySpec unpen(0.0, 1.0, GroupStructure::trivial(int(components.cols())));
    FitResult fr = fit(reduced, tau, unpen, opts);
    return components * fr.beta_hat;
}

}  // namespace

Weights weights_from_estimate(const Vector& estimate, const GroupStructure& groups,
                              const WeightScheme& scheme) {
    validate_scheme(scheme);
    if (estimate.size() != groups.p())
        throw std::invalid_argument("estimate dimension mismatch");
    Weights out;
    out.w.resize(groups.p());
    for (Eigen::Index j = 0; j < estimate.size(); ++j)
        out.w(j) =
            capped_reciprocal_power(estimate(j), scheme.gamma1, scheme.weight_cap);
    Vector group_sq = Vector::Zero(groups.K);
    for (Eigen::Index j = 0; j < estimate.size(); ++j)
        group_sq(groups.group_of[j]) += estimate(j) * estimate(j);
    out.v.resize(groups.K);
    for (int l = 0; l < groups.K; ++l)
        out.v(l) = capped_reciprocal_power(std::sqrt(group_sq(l)), scheme.gamma2,
                                           scheme.weight_cap);
    return out;
}

Weights weights_pca_d(const Dataset& train, const QuantileLevel& tau,
                      const GroupStructure& groups, const WeightScheme& scheme,
                      const SolverOptions& opts) {
    validate_scheme(scheme);
    PcaModel m = pca(train.X);
    int d = choose_components(m.explained_fractions(), scheme.variance_threshold_pct);
    Vector est = backprojected_estimate(train, tau, m.Q.leftCols(d), opts);
    return weights_from_estimate(est, groups, scheme);
}

Weights weights_pca_1(const Dataset& train, const GroupStructure& groups,
                      const WeightScheme& scheme) {
    validate_scheme(scheme);
    PcaModel m = pca(train.X);
    return weights_from_estimate(m.Q.col(0), groups, scheme);
}

Weights weights_pls_d(const Dataset& train, const QuantileLevel& tau,
                      const GroupStructure& groups, const WeightScheme& scheme,
                      const SolverOptions& opts) {
    validate_scheme(scheme);
    PlsModel m = pls1(train.X, train.y, int(std::min(train.n(), train.p())));
    int d = choose_components(m.explained_x_variance, scheme.variance_threshold_pct);
    Vector est = backprojected_estimate(train, tau, m.T.leftCols(d), opts);
    return weights_from_estimate(est, groups, scheme);
}

Weights weights_pls_1(const Dataset& train, const GroupStructure& groups,
                      const WeightScheme& scheme) {
    validate_scheme(scheme);
    PlsModel m = pls1(train.X, train.y, 1);
    return weights_from_estimate(m.T.col(0), groups, scheme);
}

Weights weights_unpenalized(const Dataset& train, const QuantileLevel& tau,
                            const GroupStructure& groups, const WeightScheme& scheme,
                            const SolverOptions& opts) {
    validate_scheme(scheme);
    if (train.n() <= train.p())
        throw std::invalid_argument(
            "unpenalized weights require n > p (train has n=" +
            std::to_string(train.n()) + ", p=" + std::to_string(train.p()) + ")");
    PenaltySpec unpen(0.0, 1.0, groups);
    FitResult fr = fit(train, tau, unpen, opts);
    return weights_from_estimate(fr.beta_hat, groups, scheme);
}

Weights compute_weights(const Dataset& train, const QuantileLevel& tau,
                        const GroupStructure& groups, const WeightScheme& scheme,
                        const SolverOptions& opts) {
    switch (scheme.kind) {
        case WeightKind::pca_d: return weights_pca_d(train, tau, groups, scheme, opts);
        case WeightKind::pca_1: return weights_pca_1(train, groups, scheme);
        case WeightKind::pls_d: return weights_pls_d(train, tau, groups, scheme, opts);
        case WeightKind::pls_1: return weights_pls_1(train, groups, scheme);
        case WeightKind::unpenalized:
            return weights_unpenalized(train, tau, groups, scheme, opts);
        case WeightKind::none:
            return {Vector::Ones(groups.p()), Vector::Ones(groups.K)};
    }
    throw std::logic_error("unreachable");
}

}  // namespace asgl
