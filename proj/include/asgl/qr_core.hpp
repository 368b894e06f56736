#pragma once

#include "asgl/data_model.hpp"

namespace asgl {

struct QuantileLevel {
    double tau;
    explicit QuantileLevel(double t);
};

/// Parameters of the weighted sparse group penalty
///   alpha*lambda * sum_j w_j |beta_j| + (1-alpha)*lambda * sum_l sqrt(p_l) v_l ||beta^l||_2
/// Special cases: LASSO (alpha=1, w=1), group LASSO (alpha=0, v=1),
/// SGL (w=1, v=1), AL-SGL (v=1), unpenalized (lambda=0).
struct PenaltySpec {
    double lambda = 0.0;
    double alpha = 1.0;
    Vector w;  // size p
    Vector v;  // size K
    GroupStructure groups;

    PenaltySpec() = default;
    PenaltySpec(double lambda_, double alpha_, GroupStructure groups_);
    PenaltySpec(double lambda_, double alpha_, Vector w_, Vector v_,
                GroupStructure groups_);

    void validate() const;
};

/// rho_tau(u) = u * (tau - I(u < 0))
double check_loss(double u, const QuantileLevel& tau);

/// (1/n) sum_i rho_tau(y_i - x_i' beta)
double qr_risk(const Vector& beta, const Dataset& d, const QuantileLevel& tau);

double penalty_value(const Vector& beta, const PenaltySpec& spec);

double objective(const Vector& beta, const Dataset& d, const QuantileLevel& tau,
                 const PenaltySpec& spec);

/// argmin_u { sigma * rho_tau(u) + (u - v)^2 / 2 }
double prox_check(double v, double sigma, const QuantileLevel& tau);

/// Proximal operator of step * penalty: elementwise soft threshold at
/// step*alpha*lambda*w_j, then per-group block shrinkage at
/// step*(1-alpha)*lambda*sqrt(p_l)*v_l.
Vector prox_asgl(const Vector& v, const PenaltySpec& spec, double step);

double soft_threshold(double x, double t);

}  // namespace asgl
