#include "kbr/embeddings.hpp"

namespace kbr {

WeightedSample empirical_mean_embedding(const PointMatrix& points, Space tag) {
    if (points.rows() == 0)
        throw input_error("empirical_mean_embedding: empty sample");
    Vector w = Vector::Constant(points.rows(), 1.0 / static_cast<double>(points.rows()));
    return WeightedSample(points, std::move(w), tag);
}

Vector kbr_prior_weights(const JointSample& joint, const WeightedSample& prior,
                         const Kernel& kx, double eps,
                         const LowRankFactor* lowrank) {
    if (!(eps > 0.0)) throw input_error("kbr_prior_weights: eps must be positive");
    if (prior.space_tag != Space::X)
        throw input_error("kbr_prior_weights: prior must live in the X space");
    const int n = joint.n();
    Vector m_pi = gram_matrix(kx, joint.x_points, prior.points) * prior.weights;
    const double c = static_cast<double>(n) * eps;
    if (lowrank != nullptr) {
        Matrix B = m_pi;
        return static_cast<double>(n) *
               solve_woodbury(c, lowrank->gamma, lowrank->gamma.transpose(), B)
                   .col(0);
    }
    Matrix G_X = gram_matrix(kx, joint.x_points);
    return static_cast<double>(n) * solve_regularized(G_X, c, m_pi);
}

WeightedSample conditional_mean_weights(const JointSample& joint,
                                        const Kernel& ky, double eps,
                                        const Point& y, double scale,
                                        const LowRankFactor* lowrank) {
    if (!(eps > 0.0))
        throw input_error("conditional_mean_weights: eps must be positive");
    const int n = joint.n();
    Vector ky_vec = kernel_vector(ky, joint.y_points, y);
    const double c = static_cast<double>(n) * eps;
    Vector nu;
    if (lowrank != nullptr) {
        Matrix B = ky_vec;
        nu = solve_woodbury(c, lowrank->gamma, lowrank->gamma.transpose(), B).col(0);
    } else {
        Matrix G_Y = gram_matrix(ky, joint.y_points);
        nu = solve_regularized(G_Y, c, ky_vec);
    }
    return WeightedSample(joint.x_points, scale * nu, Space::X);
}

}  // namespace kbr
