#include "kbr/modelsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kbr/kbr.hpp"
#include "kbr/rng.hpp"

namespace kbr {

double median_bandwidth(const PointMatrix& points) {
    const int n = static_cast<int>(points.rows());
    if (n < 2) throw input_error("median_bandwidth: need at least two points");
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            dists.push_back((points.row(i) - points.row(j)).norm());
    // Lower median.
    auto mid = dists.begin() + (static_cast<std::ptrdiff_t>(dists.size()) - 1) / 2;
    std::nth_element(dists.begin(), mid, dists.end());
    if (!(*mid > 0.0))
        throw degenerate_error("median_bandwidth: median pairwise distance is zero");
    return *mid;
}

CvPlan make_cv_plan(int n, int K, std::vector<CvTriple> grid,
                    std::uint64_t seed) {
    if (K < 2 || n < K) throw input_error("make_cv_plan: need 2 <= K <= n");
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng = Rng(seed).substream("cv-folds");
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    CvPlan plan;
    plan.K = K;
    plan.rng_seed = seed;
    plan.grid = std::move(grid);
    plan.folds.resize(static_cast<std::size_t>(K));
    for (int i = 0; i < n; ++i)
        plan.folds[static_cast<std::size_t>(i % K)].push_back(idx[static_cast<std::size_t>(i)]);
    for (auto& f : plan.folds) std::sort(f.begin(), f.end());
    return plan;
}

std::vector<CvTriple> default_cv_grid(int n) {
    std::vector<CvTriple> grid;
    for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0})
        for (double e : {1e-4, 1e-3, 1e-2, 1e-1}) {
            double eps = e / static_cast<double>(n);
            grid.push_back(CvTriple{beta, eps, 2.0 * eps});
        }
    return grid;
}

double rkhs_distance_squared(const WeightedSample& a, const WeightedSample& b,
                             const Kernel& k) {
    Matrix K_aa = gram_matrix(k, a.points);
    Matrix K_bb = gram_matrix(k, b.points);
    Matrix K_ab = gram_matrix(k, a.points, b.points);
    return a.weights.dot(K_aa * a.weights) -
           2.0 * a.weights.dot(K_ab * b.weights) +
           b.weights.dot(K_bb * b.weights);
}

namespace {

PointMatrix select_rows(const PointMatrix& m, const std::vector<int>& rows) {
    PointMatrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    return out;
}

}  // namespace

CvResult kbr_cross_validate(const JointSample& joint, const CvPlan& plan,
                            const Kernel& kx, const Kernel& ky) {
    if (plan.grid.empty()) throw input_error("kbr_cross_validate: empty grid");
    const int n = joint.n();
    if (n < 2 * plan.K)
        throw input_error("kbr_cross_validate: need n >= 2K");

    CvResult result;
    result.best = plan.grid.front();
    double best_total = std::numeric_limits<double>::infinity();

    for (const CvTriple& g : plan.grid) {
        Kernel kx_g = kx.with_bandwidth(g.beta * kx.bandwidth());
        Kernel ky_g = ky.with_bandwidth(g.beta * ky.bandwidth());
        double total = 0.0;
        bool failed = false;
        for (std::size_t a = 0; a < plan.folds.size(); ++a) {
            const auto& in_fold = plan.folds[a];
            std::vector<int> out_fold;
            out_fold.reserve(static_cast<std::size_t>(n) - in_fold.size());
            for (std::size_t b = 0; b < plan.folds.size(); ++b)
                if (b != a)
                    out_fold.insert(out_fold.end(), plan.folds[b].begin(),
                                    plan.folds[b].end());
            std::sort(out_fold.begin(), out_fold.end());

            JointSample out_joint(select_rows(joint.x_points, out_fold),
                                  select_rows(joint.y_points, out_fold));
            PointMatrix in_x = select_rows(joint.x_points, in_fold);
            PointMatrix in_y = select_rows(joint.y_points, in_fold);

            double score;
            try {
                WeightedSample prior = empirical_mean_embedding(out_joint.x_points);
                PosteriorOperator op = build_posterior_operator(
                    out_joint, prior, kx_g, ky_g,
                    RegularizationSchedule(g.eps, g.delta));
                Vector mean_w = Vector::Zero(out_joint.n());
                for (Eigen::Index j = 0; j < in_y.rows(); ++j)
                    mean_w += op.apply(
                        kernel_vector(ky_g, out_joint.y_points, in_y.row(j).transpose()));
                mean_w /= static_cast<double>(in_y.rows());
                WeightedSample avg_post(out_joint.x_points, mean_w, Space::X);
                WeightedSample in_mean = empirical_mean_embedding(in_x);
                score = rkhs_distance_squared(avg_post, in_mean, kx_g);
            } catch (const std::exception&) {
                score = std::numeric_limits<double>::infinity();
                failed = true;
            }
            result.table.push_back(
                CvScoreRow{static_cast<int>(a), g.beta, g.eps, g.delta, score});
            total += score;
        }
        if (failed) continue;
        if (total < best_total) {
            best_total = total;
            result.best = g;
            continue;
        }
        const double rel_tol = 1e-12 * std::max(1.0, std::abs(best_total));
        if (total - best_total <= rel_tol && g.eps > result.best.eps)
            result.best = g;
    }
    if (!std::isfinite(best_total))
        throw numeric_error("kbr_cross_validate: every grid point failed");
    return result;
}

}  // namespace kbr
