#pragma once

#include <optional>

#include "asgl/qr_core.hpp"

namespace asgl {

struct SolverOptions {
    int max_iter = 20000;
    double tol_kkt = 1e-5;
    double rho = 1.0;  // ADMM penalty scale; initialized as rho / (n * sd(y))
    std::optional<Vector> beta0;
    int check_every = 50;
    bool adaptive_rho = true;  // residual balancing
};

struct FitResult {
    Vector beta_hat;
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Minimizes qr_risk + penalty by linearized ADMM on the splitting r = y - X beta.
/// Non-convergence within max_iter returns converged=false with the best iterate.
FitResult fit(const Dataset& d, const QuantileLevel& tau, const PenaltySpec& spec,
              const SolverOptions& opts = {});

/// Same model with an unpenalized intercept column; returns (result over the
/// p covariate coefficients, intercept).
std::pair<FitResult, double> fit_with_intercept(const Dataset& d,
                                                const QuantileLevel& tau,
                                                const PenaltySpec& spec,
                                                const SolverOptions& opts = {});

/// Max over coordinates of the distance from 0 to the objective's
/// subdifferential at beta. Residuals within 1e-9 of zero contribute the full
/// subgradient interval of the check loss.
double kkt_residual(const Vector& beta, const Dataset& d, const QuantileLevel& tau,
                    const PenaltySpec& spec);

/// Smallest lambda making beta = 0 optimal in the alpha=1 problem with the
/// given per-variable weights; conservative anchor for lambda grids.
double lambda_max(const Dataset& d, const QuantileLevel& tau, const Vector& w);
double lambda_max(const Dataset& d, const QuantileLevel& tau);

/// Largest singular value of X by power iteration.
double spectral_norm(const Matrix& X, int max_iter = 100, double tol = 1e-6);

}  // namespace asgl
