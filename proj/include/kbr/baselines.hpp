#ifndef KBR_BASELINES_HPP
#define KBR_BASELINES_HPP

#include <cstdint>
#include <functional>

#include "kbr/embeddings.hpp"
#include "kbr/rng.hpp"

namespace kbr {

struct AbcConfig {
    double tolerance;
    std::size_t max_draws;
    std::uint64_t rng_seed = 0;

    AbcConfig(double tol, std::size_t draws, std::uint64_t seed = 0)
        : tolerance(tol), max_draws(draws), rng_seed(seed) {
        if (!(tolerance > 0.0)) throw input_error("AbcConfig: tolerance must be > 0");
        if (max_draws < 1) throw input_error("AbcConfig: max_draws must be >= 1");
    }
};

struct AbcResult {
    PointMatrix accepted;  // may have zero rows
    double acceptance_rate = 0.0;
    std::size_t draws = 0;
};

// Rejection ABC: propose from the prior, simulate an observation, accept when
// the Euclidean distance to y_obs is below the tolerance. Always runs the full
// draw budget; an empty acceptance set is a result, not an error.
AbcResult abc_rejection(const std::function<Point(Rng&)>& prior_sampler,
                        const std::function<Point(const Point&, Rng&)>& likelihood_sampler,
                        const Point& y_obs, const AbcConfig& cfg);

struct KdeConfig {
    double h_x;
    double h_y;

    KdeConfig(double hx, double hy) : h_x(hx), h_y(hy) {
        if (!(h_x > 0.0) || !(h_y > 0.0))
            throw input_error("KdeConfig: bandwidths must be positive");
    }
};

// KDE conditional density p(y|x) evaluated at each prior point, normalized
// into importance weights. A prior point where the KDE denominator underflows
// gets weight zero; if every point underflows the prior sample is disjoint
// from the data support.
WeightedSample kde_iw_posterior(const JointSample& joint,
                                const PointMatrix& prior_points,
                                const KdeConfig& cfg, const Point& y);

}  // namespace kbr

#endif
