#include <cmath>
#include <random>

#include "asgl/solver.hpp"
#include "doctest.h"
#include "lp_reference.hpp"

using namespace asgl;

namespace {

Dataset random_dataset(int n, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0, 1);
    Matrix X(n, p);
    Vector y(n);
    for (int i = 0; i < n; ++i) {
        y(i) = N(rng);
        for (int j = 0; j < p; ++j) X(i, j) = N(rng);
    }
    return Dataset(std::move(X), std::move(y));
}

}  // namespace

TEST_CASE("fit interpolates two points exactly at lambda=0") {
    Matrix X(2, 1);
    X << 1, 2;
    Vector y(2);
    y << 1, 2;
    Dataset d(X, y);
    PenaltySpec spec(0.0, 1.0, GroupStructure::trivial(1));
    FitResult fr = fit(d, QuantileLevel(0.5), spec);
    CHECK(fr.converged);
    CHECK(fr.beta_hat(0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(fr.objective == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("lambda above lambda_max zeros the solution (alpha=1)") {
    Dataset d = random_dataset(30, 8, 99);
    QuantileLevel tau(0.5);
    double lmax = lambda_max(d, tau);
    CHECK(lmax > 0.0);
    PenaltySpec spec(lmax * 1.0001, 1.0, GroupStructure::trivial(8));
    // 0 satisfies the KKT condition at this lambda
    CHECK(kkt_residual(Vector::Zero(8), d, tau, spec) <= 1e-12);
    FitResult fr = fit(d, tau, spec);
    CHECK(fr.converged);
    CHECK(fr.beta_hat.norm() == 0.0);
    // just below lambda_max, 0 is no longer optimal
    PenaltySpec below(lmax * 0.99, 1.0, GroupStructure::trivial(8));
    CHECK(kkt_residual(Vector::Zero(8), d, tau, below) > 0.0);
}

TEST_CASE("fit matches LP reformulation on a fixed lasso instance") {
    Dataset d = random_dataset(20, 2, 1234);
    QuantileLevel tau(0.5);
    double lmax = lambda_max(d, tau);
    PenaltySpec spec(0.3 * lmax, 1.0, GroupStructure::trivial(2));
    FitResult fr = fit(d, tau, spec);
    CHECK(fr.converged);
    Vector blp = asgl_test::qr_lasso_lp(d.X, d.y, 0.5, 0.3 * lmax);
    double obj_lp = objective(blp, d, tau, spec);
    CHECK(fr.objective == doctest::Approx(obj_lp).epsilon(1e-4));
    CHECK(fr.objective >= obj_lp - 1e-9);  // LP solution is exact
}

TEST_CASE("kkt_residual examples") {
    Dataset d = random_dataset(25, 4, 7);
    QuantileLevel tau(0.4);
    GroupStructure g = GroupStructure::contiguous(2, 2);
    PenaltySpec spec(0.05, 0.6, g);
    SolverOptions opts;
    FitResult fr = fit(d, tau, spec, opts);
    CHECK(fr.converged);
    CHECK(kkt_residual(fr.beta_hat, d, tau, spec) <= opts.tol_kkt);

    PenaltySpec huge(1e6, 1.0, g);
    CHECK(kkt_residual(Vector::Zero(4), d, tau, huge) == 0.0);

    // perturbing the largest coordinate strictly increases the residual
    Vector b = fr.beta_hat;
    Eigen::Index jmax = 0;
    b.cwiseAbs().maxCoeff(&jmax);
    Vector bp = b;
    bp(jmax) += 0.1;
    CHECK(kkt_residual(bp, d, tau, spec) > kkt_residual(b, d, tau, spec));
}

TEST_CASE("objective never exceeds the zero-vector objective") {
    std::mt19937_64 seeds(55);
    for (int k = 0; k < 10; ++k) {
        Dataset d = random_dataset(20, 6, seeds());
        QuantileLevel tau(0.5);
        GroupStructure g = GroupStructure::contiguous(3, 2);
        PenaltySpec spec(0.1, 0.5, g);
        FitResult fr = fit(d, tau, spec);
        CHECK(fr.objective <= objective(Vector::Zero(6), d, tau, spec) + 1e-12);
    }
}

TEST_CASE("special-case consistency: lasso equals SGL with zero group weights") {
    std::mt19937_64 seeds(77);
    for (int k = 0; k < 5; ++k) {
        Dataset d = random_dataset(25, 5, seeds());
        QuantileLevel tau(0.5);
        GroupStructure g = GroupStructure::contiguous(1, 5);
        double lambda = 0.3 * lambda_max(d, tau);
        PenaltySpec lasso(lambda, 1.0, g);
        // alpha=0.5 with doubled lambda and v=0 is the same objective
        PenaltySpec sgl(2.0 * lambda, 0.5, Vector::Ones(5), Vector::Zero(1), g);
        FitResult fa = fit(d, tau, lasso);
        FitResult fb = fit(d, tau, sgl);
        CHECK(fa.converged);
        CHECK(fb.converged);
        CHECK(objective(fa.beta_hat, d, tau, lasso) ==
              doctest::Approx(objective(fb.beta_hat, d, tau, lasso)).epsilon(1e-8));
    }
}

TEST_CASE("lambda=0 reproduces classical QR residual-sign balance") {
    Dataset d = random_dataset(60, 3, 2024);
    for (double tau : {0.3, 0.5, 0.7}) {
        PenaltySpec unpen(0.0, 1.0, GroupStructure::trivial(3));
        // the balance property is stationarity w.r.t. the intercept
        SolverOptions opts;
        opts.max_iter = 200000;
        auto [fr, b0] = fit_with_intercept(d, QuantileLevel(tau), unpen, opts);
        CHECK(fr.converged);
        Vector r = d.y - d.X * fr.beta_hat - Vector::Constant(60, b0);
        int neg = 0, nonpos = 0, zero = 0;
        for (int i = 0; i < 60; ++i) {
            if (r(i) < -1e-6) ++neg;
            if (r(i) <= 1e-6) ++nonpos;
            if (std::abs(r(i)) <= 1e-6) ++zero;
        }
        CHECK(zero <= 4);  // slopes plus intercept
        CHECK(double(neg) / 60.0 <= tau + 4.0 / 60.0 + 1e-9);
        CHECK(tau <= double(nonpos) / 60.0 + 4.0 / 60.0 + 1e-9);
    }
}

TEST_CASE("warm starts along a lambda path do not blow up iteration counts") {
    Dataset d = random_dataset(40, 10, 4242);
    QuantileLevel tau(0.5);
    GroupStructure g = GroupStructure::contiguous(2, 5);
    double lmax = lambda_max(d, tau);
    std::vector<double> path;
    for (int i = 0; i < 8; ++i) path.push_back(lmax * std::pow(0.5, i + 1));

    long cold = 0, warm = 0;
    SolverOptions opts;
    for (double l : path) {
        PenaltySpec spec(l, 0.7, g);
        cold += fit(d, tau, spec, opts).iterations;
    }
    SolverOptions w = opts;
    for (double l : path) {
        PenaltySpec spec(l, 0.7, g);
        FitResult fr = fit(d, tau, spec, w);
        warm += fr.iterations;
        w.beta0 = fr.beta_hat;
    }
    CHECK(warm <= 2 * cold);
}

TEST_CASE("fit_with_intercept leaves the offset unpenalized") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> N(0, 1);
    Matrix X(50, 2);
    Vector y(50);
    for (int i = 0; i < 50; ++i) {
        X(i, 0) = N(rng);
        X(i, 1) = N(rng);
        y(i) = 5.0 + X(i, 0) + N(rng) * 0.1;
    }
    Dataset d(X, y);
    PenaltySpec spec(1e4, 1.0, GroupStructure::trivial(2));  // kills all slopes
    auto [fr, intercept] = fit_with_intercept(d, QuantileLevel(0.5), spec);
    CHECK(fr.beta_hat.norm() == doctest::Approx(0.0).epsilon(1e-8));
    // intercept converges to the median of y
    std::vector<double> ys(y.data(), y.data() + 50);
    std::nth_element(ys.begin(), ys.begin() + 25, ys.end());
    CHECK(std::abs(intercept - ys[25]) < 0.2);
}

TEST_CASE("non-convergence reports converged=false with best iterate") {
    Dataset d = random_dataset(30, 5, 31);
    SolverOptions opts;
    opts.max_iter = 3;
    opts.check_every = 1;
    PenaltySpec spec(0.01, 0.5, GroupStructure::trivial(5));
    FitResult fr = fit(d, QuantileLevel(0.5), spec, opts);
    CHECK_FALSE(fr.converged);
    CHECK(fr.objective <= objective(Vector::Zero(5), d, QuantileLevel(0.5), spec));
}

TEST_CASE("dimension mismatches are errors") {
    Dataset d = random_dataset(10, 3, 1);
    PenaltySpec spec(0.1, 1.0, GroupStructure::trivial(4));
    CHECK_THROWS(fit(d, QuantileLevel(0.5), spec));
    CHECK_THROWS(kkt_residual(Vector::Zero(4), d, QuantileLevel(0.5), spec));
}
