#include "kbr/baselines.hpp"

#include <cmath>
#include <vector>

namespace kbr {

AbcResult abc_rejection(const std::function<Point(Rng&)>& prior_sampler,
                        const std::function<Point(const Point&, Rng&)>& likelihood_sampler,
                        const Point& y_obs, const AbcConfig& cfg) {
    Rng rng = Rng(cfg.rng_seed).substream("abc");
    std::vector<Point> accepted;
    for (std::size_t t = 0; t < cfg.max_draws; ++t) {
        Point x = prior_sampler(rng);
        Point y = likelihood_sampler(x, rng);
        if ((y - y_obs).norm() < cfg.tolerance) accepted.push_back(std::move(x));
    }
    AbcResult res;
    res.draws = cfg.max_draws;
    res.acceptance_rate =
        static_cast<double>(accepted.size()) / static_cast<double>(cfg.max_draws);
    if (!accepted.empty()) {
        res.accepted.resize(static_cast<Eigen::Index>(accepted.size()),
                            accepted.front().size());
        for (std::size_t i = 0; i < accepted.size(); ++i)
            res.accepted.row(static_cast<Eigen::Index>(i)) = accepted[i].transpose();
    }
    return res;
}

namespace {

// Product Gaussian density kernel h^{-d} K(u/h), up to the constant
// (2 pi)^{-d/2} which cancels in the importance ratio.
double gauss_kde(const Eigen::RowVectorXd& diff, double h) {
    const double d = static_cast<double>(diff.size());
    return std::exp(-diff.squaredNorm() / (2.0 * h * h)) / std::pow(h, d);
}

}  // namespace

WeightedSample kde_iw_posterior(const JointSample& joint,
                                const PointMatrix& prior_points,
                                const KdeConfig& cfg, const Point& y) {
    if (prior_points.rows() == 0)
        throw input_error("kde_iw_posterior: empty prior sample");
    const int ell = static_cast<int>(prior_points.rows());
    const int n = joint.n();

    Vector zeta(ell);
    for (int i = 0; i < ell; ++i) {
        double num = 0.0, den = 0.0;
        for (int j = 0; j < n; ++j) {
            double kx = gauss_kde(prior_points.row(i) - joint.x_points.row(j), cfg.h_x);
            den += kx;
            num += kx * gauss_kde(y.transpose() - joint.y_points.row(j), cfg.h_y);
        }
        zeta(i) = den > 0.0 ? num / den : 0.0;
    }
    const double total = zeta.sum();
    if (!(total > 0.0))
        throw degenerate_error(
            "kde_iw_posterior: prior sample disjoint from data support");
    return WeightedSample(prior_points, zeta / total, Space::X);
}

}  // namespace kbr
