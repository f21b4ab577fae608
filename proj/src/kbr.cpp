#include "kbr/kbr.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

namespace kbr {

const Matrix& PosteriorOperator::R() const {
    if (!dense_)
        throw input_error("posterior operator was built on the low-rank path");
    return R_;
}

Vector PosteriorOperator::apply(const Vector& ky_vec) const {
    if (ky_vec.size() != mu_.size())
        throw input_error("posterior apply: vector length mismatch");
    if (dense_) return R_ * ky_vec;
    return kbr_weight_action_lowrank(mu_, gamma_y_, schedule_.delta, ky_vec);
}

Vector kbr_weight_action(const Vector& mu, const Matrix& G_Y, double delta,
                         const Vector& ky_vec) {
    Matrix M = mu.asDiagonal() * G_Y;
    Matrix A = M * M + delta * Matrix::Identity(G_Y.rows(), G_Y.cols());
    Vector b = (mu.array() * ky_vec.array()).matrix();
    Eigen::PartialPivLU<Matrix> lu(A);
    Vector x = lu.solve(b);
    if (!x.allFinite())
        throw numeric_error("kbr_weight_action: solve produced non-finite values");
    return M * x;
}

Vector kbr_weight_action_lowrank(const Vector& mu, const Matrix& gamma_y,
                                 double delta, const Vector& ky_vec) {
    // (Lambda G_Y)^2 = W (Gamma^T W) Gamma^T with W = Lambda Gamma, so the
    // inner solve needs only an r x r factorization.
    Matrix W = mu.asDiagonal() * gamma_y;
    Matrix U = W * (gamma_y.transpose() * W);
    Matrix b = (mu.array() * ky_vec.array()).matrix();
    Vector s = solve_woodbury(delta, U, gamma_y.transpose(), b).col(0);
    return W * (gamma_y.transpose() * s);
}

PosteriorOperator build_posterior_operator(
    const JointSample& joint, const WeightedSample& prior, const Kernel& kx,
    const Kernel& ky, const RegularizationSchedule& schedule,
    const std::optional<LowRankPair>& lowrank) {
    const int n = joint.n();
    const LowRankFactor* lr_x = lowrank ? &lowrank->x : nullptr;
    Vector mu = kbr_prior_weights(joint, prior, kx, schedule.eps, lr_x);

    PosteriorOperator op(joint.x_points, joint.y_points, ky, schedule,
                         std::move(mu));
    if (lowrank) {
        op.dense_ = false;
        op.gamma_y_ = lowrank->y.gamma;
        return op;
    }

    Matrix G_Y = gram_matrix(ky, joint.y_points);
    Matrix M = op.mu_.asDiagonal() * G_Y;
    Matrix A = M * M + schedule.delta * Matrix::Identity(n, n);
    Eigen::PartialPivLU<Matrix> lu(A);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-15) || !A.allFinite())
        throw numeric_error(
            "posterior operator solve failed (delta = " +
            std::to_string(schedule.delta) + ", rcond ~ " + std::to_string(rcond) + ")");
    Matrix Lambda = Matrix(op.mu_.asDiagonal());
    op.R_ = M * lu.solve(Lambda);
    if (!op.R_.allFinite())
        throw numeric_error("posterior operator contains non-finite entries");
    return op;
}

WeightedSample posterior_weights(const PosteriorOperator& op, const Point& y) {
    Vector ky_vec = kernel_vector(op.ky(), op.y_points(), y);
    return WeightedSample(op.x_points(), op.apply(ky_vec), Space::X);
}

double posterior_expectation(const PosteriorOperator& op,
                             const Vector& f_values, const Point& y) {
    if (f_values.size() != op.x_points().rows())
        throw input_error("posterior_expectation: f_values length mismatch");
    Vector ky_vec = kernel_vector(op.ky(), op.y_points(), y);
    return f_values.dot(op.apply(ky_vec));
}

PreimageResult preimage(const WeightedSample& ws, const Kernel& kx,
                        const Point& x0, double tol, int max_iter) {
    if (kx.type() != Kernel::Type::gaussian_rbf)
        throw input_error("preimage requires a GaussianRBF kernel");
    if (!x0.allFinite()) throw input_error("preimage: non-finite start point");

    PreimageResult res;
    res.x = x0;
    for (int it = 0; it < max_iter; ++it) {
        Vector kvec = kernel_vector(kx, ws.points, res.x);
        Vector w = (ws.weights.array() * kvec.array()).matrix();
        const double denom = w.sum();
        if (std::abs(denom) < 1e-12)
            throw degenerate_error(
                "preimage: weights cancel near the iterate (denominator ~ 0)");
        Point next = (ws.points.transpose() * w) / denom;
        const double step = (next - res.x).norm();
        res.x = std::move(next);
        res.iterations = it + 1;
        if (step <= tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

PreimageResult preimage(const WeightedSample& ws, const Kernel& kx) {
    int start = 0;
    for (int i = 1; i < ws.size(); ++i)
        if (ws.weights(i) > ws.weights(start)) start = i;
    Point x0 = ws.points.row(start).transpose();
    return preimage(ws, kx, x0, 1e-8 * kx.bandwidth(), 200);
}

}  // namespace kbr
