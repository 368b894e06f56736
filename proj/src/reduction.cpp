#include "asgl/reduction.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace asgl {

namespace {

// Flip column signs so the largest-magnitude entry is positive.
void fix_signs(Matrix& M) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
        Eigen::Index imax = 0;
        M.col(c).cwiseAbs().maxCoeff(&imax);
        if (M(imax, c) < 0.0) M.col(c) = -M.col(c);
    }
}

Matrix center_columns(const Matrix& X) {
    return X.rowwise() - X.colwise().mean();
}

}  // namespace

Vector PcaModel::explained_fractions() const {
    double total = eigenvalues.sum();
    if (total <= 0.0) return Vector::Zero(r);
    return eigenvalues / total;
}

PcaModel pca(const Matrix& X) {
    if (X.rows() < 2) throw std::invalid_argument("pca requires n >= 2");
    Matrix Xc = center_columns(X);
    Eigen::BDCSVD<Matrix> svd(Xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double cutoff = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    r = std::max(r, 1);
    PcaModel m;
    m.r = r;
    m.Q = svd.matrixV().leftCols(r);
    m.eigenvalues = sv.head(r).array().square() / double(X.rows() - 1);
    fix_signs(m.Q);
    return m;
}

PlsModel pls1(const Matrix& X, const Vector& y, int max_components) {
    if (X.rows() != y.size()) throw std::invalid_argument("pls1 dimension mismatch");
    if (max_components < 1)
        throw std::invalid_argument("max_components must be >= 1");
    const auto n = X.rows();
    const auto p = X.cols();
    Matrix Xd = center_columns(X);
    Vector yc = y.array() - y.mean();
    const double total_ss = Xd.squaredNorm();
    const int s_max = std::min<int>(max_components, int(std::min(n, p)));

    Matrix W(p, s_max), P(p, s_max);
    Vector expl(s_max);
    int s = 0;
    for (int i = 0; i < s_max; ++i) {
        Vector c = Xd.transpose() * yc;
        double cn = c.norm();
        if (cn <= 1e-10) {
            if (i == 0)
                throw std::runtime_error(
                    "pls1: response has zero covariance with every column");
            break;
        }
        Vector w = c / cn;
        Vector u = Xd * w;
        double uu = u.squaredNorm();
        if (uu <= 1e-20) break;
        Vector pl = Xd.transpose() * u / uu;
        W.col(i) = w;
        P.col(i) = pl;
        expl(i) = total_ss > 0.0 ? uu * pl.squaredNorm() / total_ss : 0.0;
        Xd -= u * pl.transpose();
        ++s;
    }

    PlsModel m;
    m.s = s;
    // transformed weights: scores on the original centered X equal the
    // deflation scores, U = Xc * T with T = W (P'W)^-1
    Matrix Ws = W.leftCols(s), Ps = P.leftCols(s);
    Matrix PtW = Ps.transpose() * Ws;
    m.T = Ws * PtW.inverse();
    m.explained_x_variance = expl.head(s);
    fix_signs(m.T);
    return m;
}

int choose_components(const Vector& explained_fractions, double threshold_pct) {
    if (explained_fractions.size() == 0)
        throw std::invalid_argument("choose_components: empty input");
    if (!(threshold_pct > 0.0 && threshold_pct <= 100.0))
        throw std::invalid_argument("threshold must lie in (0,100]");
    double cum = 0.0;
    for (Eigen::Index i = 0; i < explained_fractions.size(); ++i) {
        cum += explained_fractions(i);
        if (cum * 100.0 >= threshold_pct - 1e-9) return int(i) + 1;
    }
    return int(explained_fractions.size());
}

}  // namespace asgl
