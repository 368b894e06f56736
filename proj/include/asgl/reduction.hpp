#pragma once

#include "asgl/data_model.hpp"

namespace asgl {

struct PcaModel {
    Matrix Q;            // p x r, orthonormal loading columns
    Vector eigenvalues;  // r, nonincreasing component variances
    int r = 0;

    /// Per-component fraction of total variance.
    Vector explained_fractions() const;
};

struct PlsModel {
    Matrix T;                   // p x s; scores U = Xc * T are uncorrelated
    Vector explained_x_variance;  // s, per-component fraction of ||Xc||_F^2
    int s = 0;
};

/// PCA of the column-centered matrix via SVD; eigenvalue = sv^2 / (n-1).
/// Singular values below 1e-10 * largest are dropped. Sign convention:
/// the largest-magnitude entry of each loading column is positive.
PcaModel pca(const Matrix& X);

/// Univariate-response PLS with NIPALS X-deflation. T holds the transformed
/// weights, so scores on the original centered X are mutually uncorrelated.
/// Extraction stops early when ||X_deflated' y|| <= 1e-10.
PlsModel pls1(const Matrix& X, const Vector& y, int max_components);

/// Smallest d whose cumulative explained percentage reaches threshold_pct;
/// all components when the total falls short.
int choose_components(const Vector& explained_fractions, double threshold_pct);

}  // namespace asgl
