#ifndef KBR_KBR_HPP
#define KBR_KBR_HPP

#include <optional>

#include "kbr/embeddings.hpp"

namespace kbr {

// Above this sample size callers should prefer the low-rank path; the n x n
// posterior operator is only materialized densely below it.
inline constexpr int kDenseThreshold = 500;

// Optional incomplete-Cholesky factors of G_X and G_Y.
struct LowRankPair {
    LowRankFactor x;
    LowRankFactor y;
};

// Posterior operator R = Lambda G_Y ((Lambda G_Y)^2 + delta I)^{-1} Lambda
// with Lambda = diag(mu). Immutable once built; conditioning on y reduces to
// the matrix action R * k_Y(y).
class PosteriorOperator {
public:
    const PointMatrix& x_points() const { return x_points_; }
    const PointMatrix& y_points() const { return y_points_; }
    const Kernel& ky() const { return ky_; }
    const RegularizationSchedule& schedule() const { return schedule_; }
    const Vector& prior_propagated_weights() const { return mu_; }
    bool dense() const { return dense_; }
    // Dense path only.
    const Matrix& R() const;

    // R * ky_vec, on whichever path this operator was built.
    Vector apply(const Vector& ky_vec) const;

    friend PosteriorOperator build_posterior_operator(
        const JointSample&, const WeightedSample&, const Kernel&, const Kernel&,
        const RegularizationSchedule&, const std::optional<LowRankPair>&);

private:
    PosteriorOperator(PointMatrix x, PointMatrix y, Kernel ky,
                      RegularizationSchedule sched, Vector mu)
        : x_points_(std::move(x)), y_points_(std::move(y)), ky_(std::move(ky)),
          schedule_(sched), mu_(std::move(mu)) {}

    PointMatrix x_points_, y_points_;
    Kernel ky_;
    RegularizationSchedule schedule_;
    Vector mu_;
    bool dense_ = true;
    Matrix R_;        // dense path
    Matrix gamma_y_;  // low-rank path: G_Y ~= gamma_y gamma_y^T
};

PosteriorOperator build_posterior_operator(
    const JointSample& joint, const WeightedSample& prior, const Kernel& kx,
    const Kernel& ky, const RegularizationSchedule& schedule,
    const std::optional<LowRankPair>& lowrank = std::nullopt);

// rho = R * k_Y(y) attached to the X anchor points; unnormalized, entries may
// be negative.
WeightedSample posterior_weights(const PosteriorOperator& op, const Point& y);

// f_X^T R k_Y(y) where f_values[i] = f(X_i).
double posterior_expectation(const PosteriorOperator& op,
                             const Vector& f_values, const Point& y);

// The core KBR weight map rho = Lambda G_Y ((Lambda G_Y)^2 + delta I)^{-1}
// Lambda ky_vec, shared with the filter update.
Vector kbr_weight_action(const Vector& mu, const Matrix& G_Y, double delta,
                         const Vector& ky_vec);
// Same action with G_Y ~= gamma_y gamma_y^T, O(n r^2).
Vector kbr_weight_action_lowrank(const Vector& mu, const Matrix& gamma_y,
                                 double delta, const Vector& ky_vec);

struct PreimageResult {
    Point x;
    bool converged = false;
    int iterations = 0;
};

// Fixed-point iteration for the Gaussian-kernel preimage of a weighted
// embedding: x <- weighted mean under rho_i exp(-|X_i - x|^2 / 2 sigma^2).
PreimageResult preimage(const WeightedSample& ws, const Kernel& kx,
                        const Point& x0, double tol, int max_iter);

// Defaults: start at the highest-weight point (lowest index on ties),
// tol = 1e-8 * sigma, max_iter = 200.
PreimageResult preimage(const WeightedSample& ws, const Kernel& kx);

}  // namespace kbr

#endif
