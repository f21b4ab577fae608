#ifndef KBR_MODELSEL_HPP
#define KBR_MODELSEL_HPP

#include <cstdint>
#include <vector>

#include "kbr/embeddings.hpp"

namespace kbr {

// Median of all pairwise Euclidean distances (lower median for even counts).
double median_bandwidth(const PointMatrix& points);

struct CvTriple {
    double beta;   // bandwidth multiplier
    double eps;
    double delta;
};

struct CvPlan {
    int K = 10;
    std::vector<std::vector<int>> folds;
    std::vector<CvTriple> grid;
    std::uint64_t rng_seed = 0;
};

// Disjoint folds covering {0..n-1}, sizes differing by at most one,
// assignment shuffled reproducibly from the seed.
CvPlan make_cv_plan(int n, int K, std::vector<CvTriple> grid,
                    std::uint64_t seed);

// Default grid: beta in {0.25,0.5,1,2,4}, eps in {1e-4..1e-1}/n, delta = 2 eps.
std::vector<CvTriple> default_cv_grid(int n);

// ||sum_i a_i k(.,p_i) - sum_j b_j k(.,q_j)||^2 expanded via Gram matrices.
double rkhs_distance_squared(const WeightedSample& a, const WeightedSample& b,
                             const Kernel& k);

struct CvScoreRow {
    int fold;
    double beta, eps, delta, score;
};

struct CvResult {
    CvTriple best;
    std::vector<CvScoreRow> table;  // per (grid point, fold)
};

// K-fold CV for KBR hyperparameters: the posterior operator is built on
// out-of-fold data with the out-of-fold empirical X marginal as prior, the
// posterior embeddings at in-fold Y_j are averaged, and the squared RKHS
// distance to the in-fold empirical X mean is the score. Ties go to larger
// eps, then to the lower grid index.
CvResult kbr_cross_validate(const JointSample& joint, const CvPlan& plan,
                            const Kernel& kx, const Kernel& ky);

}  // namespace kbr

#endif
