#ifndef KBR_EMBEDDINGS_HPP
#define KBR_EMBEDDINGS_HPP

#include "kbr/kernels.hpp"
#include "kbr/linalg.hpp"
#include "kbr/types.hpp"

namespace kbr {

enum class Space : char { X = 'X', Y = 'Y' };

// Weighted sample representing an embedded distribution. Weights may be
// negative and need not sum to one.
struct WeightedSample {
    PointMatrix points;
    Vector weights;
    Space space_tag = Space::X;

    WeightedSample() = default;
    WeightedSample(PointMatrix pts, Vector w, Space tag = Space::X)
        : points(std::move(pts)), weights(std::move(w)), space_tag(tag) {
        if (points.rows() == 0 || points.rows() != weights.size())
            throw input_error("WeightedSample: points/weights size mismatch");
        if (!weights.allFinite())
            throw input_error("WeightedSample: non-finite weights");
    }

    int size() const { return static_cast<int>(points.rows()); }
};

struct JointSample {
    PointMatrix x_points;
    PointMatrix y_points;

    JointSample() = default;
    JointSample(PointMatrix x, PointMatrix y)
        : x_points(std::move(x)), y_points(std::move(y)) {
        if (x_points.rows() != y_points.rows() || x_points.rows() == 0)
            throw input_error("JointSample: paired samples must match in length");
    }

    int n() const { return static_cast<int>(x_points.rows()); }
};

// Uniform weights 1/n on the given points.
WeightedSample empirical_mean_embedding(const PointMatrix& points,
                                        Space tag = Space::X);

// Propagates a prior embedding through the joint sample: the weight vector mu
// such that ({(X_i,Y_i)}, mu) represents the joint under the prior, and
// ({Y_i}, mu) its Y marginal. mu = n (G_X + n eps I)^{-1} m_pi with
// m_pi[i] = sum_j gamma_j kx(X_i, U_j). A low-rank factor of G_X switches the
// solve to the Woodbury path.
Vector kbr_prior_weights(const JointSample& joint, const WeightedSample& prior,
                         const Kernel& kx, double eps,
                         const LowRankFactor* lowrank = nullptr);

// Pointwise conditional embedding of X given Y = y:
// nu = scale * (G_Y + n eps I)^{-1} k_Y(y) attached to the X points.
WeightedSample conditional_mean_weights(const JointSample& joint,
                                        const Kernel& ky, double eps,
                                        const Point& y, double scale = 1.0,
                                        const LowRankFactor* lowrank = nullptr);

}  // namespace kbr

#endif
