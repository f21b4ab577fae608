#include "kbr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace kbr {

namespace {

constexpr double kJitterFloor = 1e-12;

Eigen::LLT<Matrix> factor_spd(const Matrix& A) {
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() == Eigen::Success) return llt;
    Matrix jittered = A + kJitterFloor * Matrix::Identity(A.rows(), A.cols());
    llt.compute(jittered);
    if (llt.info() != Eigen::Success)
        throw numeric_error("SPD factorization failed even with jitter");
    return llt;
}

}  // namespace

Matrix solve_regularized(const Matrix& G, double c, const Matrix& B) {
    if (!(c > 0.0)) throw input_error("solve_regularized: c must be positive");
    if (G.rows() != G.cols() || G.rows() != B.rows())
        throw input_error("solve_regularized: dimension mismatch");
    if (!G.allFinite() || !B.allFinite())
        throw input_error("solve_regularized: non-finite entries");
    Matrix A = G + c * Matrix::Identity(G.rows(), G.cols());
    return factor_spd(A).solve(B);
}

Vector solve_regularized(const Matrix& G, double c, const Vector& b) {
    Matrix B = b;
    return solve_regularized(G, c, B).col(0);
}

LowRankFactor incomplete_cholesky(const std::function<double(int, int)>& g_oracle,
                                  int n, double tol, int max_rank) {
    if (n < 1) throw input_error("incomplete_cholesky: empty matrix");
    if (tol < 0.0) throw input_error("incomplete_cholesky: tol must be >= 0");
    max_rank = std::min(max_rank, n);

    Vector diag(n);
    for (int i = 0; i < n; ++i) diag(i) = g_oracle(i, i);

    Matrix gamma(n, max_rank);
    std::vector<int> pivots;
    pivots.reserve(static_cast<std::size_t>(max_rank));

    double residual = diag.sum();
    int r = 0;
    while (r < max_rank && residual > tol) {
        int piv = 0;
        double best = diag(0);
        for (int i = 1; i < n; ++i) {
            if (diag(i) > best) {
                best = diag(i);
                piv = i;
            }
        }
        if (best < -1e-10)
            throw numeric_error("incomplete_cholesky: input not PSD");
        if (best <= 0.0) break;

        const double root = std::sqrt(best);
        for (int i = 0; i < n; ++i) {
            double v = g_oracle(i, piv);
            for (int k = 0; k < r; ++k) v -= gamma(i, k) * gamma(piv, k);
            gamma(i, r) = v / root;
        }
        gamma(piv, r) = root;

        for (int i = 0; i < n; ++i) diag(i) -= gamma(i, r) * gamma(i, r);
        diag(piv) = 0.0;
        pivots.push_back(piv);
        ++r;

        residual = 0.0;
        for (int i = 0; i < n; ++i) {
            if (diag(i) < -1e-10)
                throw numeric_error("incomplete_cholesky: input not PSD");
            residual += diag(i);
        }
    }

    LowRankFactor f;
    f.gamma = gamma.leftCols(r);
    f.pivots = std::move(pivots);
    f.residual_bound = std::max(residual, 0.0);
    return f;
}

LowRankFactor incomplete_cholesky(const Matrix& G, double tol, int max_rank) {
    if (G.rows() != G.cols())
        throw input_error("incomplete_cholesky: matrix not square");
    return incomplete_cholesky(
        [&G](int i, int j) { return G(i, j); }, static_cast<int>(G.rows()),
        tol, max_rank);
}

Matrix solve_woodbury(double D_scale, const Matrix& U, const Matrix& V,
                      const Matrix& B) {
    if (!(D_scale > 0.0))
        throw input_error("solve_woodbury: D_scale must be positive");
    if (U.cols() == 0 || U.size() == 0) return B / D_scale;
    if (U.rows() != B.rows() || V.cols() != B.rows() || V.rows() != U.cols())
        throw input_error("solve_woodbury: dimension mismatch");

    const Eigen::Index r = U.cols();
    Matrix inner = D_scale * Matrix::Identity(r, r) + V * U;
    Eigen::PartialPivLU<Matrix> lu(inner);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14))
        throw numeric_error("solve_woodbury: singular inner system (rcond ~ " +
                            std::to_string(rcond) + ")");
    return (B - U * lu.solve(V * B)) / D_scale;
}

Matrix solve_woodbury(double D_scale, const Matrix& U, const Matrix& C,
                      const Matrix& V, const Matrix& B) {
    if (U.size() == 0) return B / D_scale;
    return solve_woodbury(D_scale, Matrix(U * C), V, B);
}

}  // namespace kbr
