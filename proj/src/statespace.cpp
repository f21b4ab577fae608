#include "kbr/statespace.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "kbr/modelsel.hpp"

namespace kbr {

FilterModel filter_train(const PointMatrix& x_traj, const PointMatrix& y_traj,
                         const Kernel& kx, const Kernel& ky,
                         const RegularizationSchedule& schedule, int rank) {
    const int T = static_cast<int>(x_traj.rows()) - 1;
    if (T < 2) throw input_error("filter_train: need at least 3 states (T >= 2)");
    if (y_traj.rows() < T)
        throw input_error("filter_train: observation trajectory too short");

    FilterModel model(kx, ky, schedule);
    model.x_train = x_traj;
    model.y_train = y_traj.topRows(T);

    PointMatrix x_head = x_traj.topRows(T);
    model.G_X = gram_matrix(kx, x_head);
    model.G_Y = gram_matrix(ky, model.y_train);
    model.G_XXp = gram_matrix(kx, x_head, PointMatrix(x_traj.bottomRows(T)));

    if (rank > 0) {
        // One factorization of the Gram matrix over all T+1 states; row slices
        // give consistent approximations of G_X and the transfer matrix.
        Matrix G_full = gram_matrix(kx, x_traj);
        LowRankFactor fx = incomplete_cholesky(G_full, 0.0, rank);
        LowRankFactor fy = incomplete_cholesky(model.G_Y, 0.0, rank);
        model.lowrank = true;
        model.gamma_x = fx.gamma.topRows(T);
        model.gamma_p = fx.gamma.bottomRows(T);
        model.gamma_y = fy.gamma;
    }
    return model;
}

FilterState filter_init(const FilterModel& model, const Point& y1,
                        bool scale_by_T) {
    const int T = model.T();
    const double c = static_cast<double>(T) * model.schedule.eps;
    Vector ky_vec = kernel_vector(model.ky, model.y_train, y1);
    Vector alpha;
    if (model.lowrank) {
        Matrix B = ky_vec;
        alpha = solve_woodbury(c, model.gamma_y, model.gamma_y.transpose(), B).col(0);
    } else {
        alpha = solve_regularized(model.G_Y, c, ky_vec);
    }
    if (scale_by_T) alpha *= static_cast<double>(T);
    FilterState state;
    state.alpha = std::move(alpha);
    state.t = 1;
    return state;
}

namespace {

// (G_X + T eps I)^{-1} b on whichever path the model was trained.
Vector solve_gx(const FilterModel& model, const Vector& b) {
    const double c = static_cast<double>(model.T()) * model.schedule.eps;
    if (model.lowrank) {
        Matrix B = b;
        return solve_woodbury(c, model.gamma_x, model.gamma_x.transpose(), B).col(0);
    }
    return solve_regularized(model.G_X, c, b);
}

Vector smoothed_alpha(const FilterModel& model, const Vector& alpha) {
    if (model.lowrank)
        return solve_gx(model, model.gamma_x * (model.gamma_x.transpose() * alpha));
    return solve_gx(model, model.G_X * alpha);
}

}  // namespace

Vector filter_predict(const FilterModel& model, const FilterState& state) {
    if (state.alpha.size() != model.T())
        throw input_error("filter_predict: state/model size mismatch");
    Vector v = smoothed_alpha(model, state.alpha);
    Vector w = model.lowrank
                   ? Vector(model.gamma_x * (model.gamma_p.transpose() * v))
                   : Vector(model.G_XXp * v);
    return solve_gx(model, w);
}

FilterState filter_update(const FilterModel& model, const Vector& mu,
                          const Point& y_new, int t_prev) {
    if (mu.size() != model.T())
        throw input_error("filter_update: weight vector length mismatch");
    Vector ky_vec = kernel_vector(model.ky, model.y_train, y_new);
    FilterState next;
    next.alpha = model.lowrank
                     ? kbr_weight_action_lowrank(mu, model.gamma_y,
                                                 model.schedule.delta, ky_vec)
                     : kbr_weight_action(mu, model.G_Y, model.schedule.delta,
                                         ky_vec);
    if (!next.alpha.allFinite())
        throw numeric_error("filter_update: non-finite filter weights");
    next.t = t_prev + 1;
    next.last_mu = mu;
    return next;
}

FilterState filter_step(const FilterModel& model, const FilterState& state,
                        const Point& y_new) {
    Vector mu = filter_predict(model, state);
    return filter_update(model, mu, y_new, state.t);
}

Point filter_point_estimate(const FilterModel& model, const FilterState& state,
                            bool use_preimage) {
    WeightedSample ws(model.x_train.topRows(model.T()), state.alpha, Space::X);
    if (use_preimage) return preimage(ws, model.kx).x;
    const double total = state.alpha.sum();
    if (std::abs(total) < 1e-12)
        throw degenerate_error("filter_point_estimate: weights cancel");
    return (ws.points.transpose() * state.alpha) / total;
}

Point filter_predicted_state(const FilterModel& model, const FilterState& state) {
    Vector w = smoothed_alpha(model, state.alpha);
    const double total = w.sum();
    if (std::abs(total) < 1e-12)
        throw degenerate_error("filter_predicted_state: weights cancel");
    return (model.x_train.bottomRows(model.T()).transpose() * w) / total;
}

EkfState ekf_step(const DifferentiableModel& model, const EkfState& state,
                  const Point& y) {
    // Predict.
    Point m_pred = model.f(state.mean);
    Matrix F = model.F(state.mean);
    Matrix P_pred = F * state.cov * F.transpose() + model.Q;

    // Update.
    Matrix H = model.H(m_pred);
    Matrix S = H * P_pred * H.transpose() + model.R;
    Matrix K = S.ldlt().solve(H * P_pred.transpose()).transpose();
    Point mean = m_pred + K * (y - model.h(m_pred));
    Matrix I = Matrix::Identity(P_pred.rows(), P_pred.cols());
    Matrix P = (I - K * H) * P_pred;

    // Symmetrize and clip small negative eigenvalues.
    P = 0.5 * (P + P.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(P);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < 0.0) {
        if (min_eig < -1e-8 * std::max(1.0, es.eigenvalues().maxCoeff()))
            throw numeric_error("ekf_step: covariance indefinite after update");
        Vector clipped = es.eigenvalues().cwiseMax(0.0);
        P = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
    }
    return EkfState{std::move(mean), std::move(P)};
}

FilterParams select_filter_params(const PointMatrix& x_traj,
                                  const PointMatrix& y_traj,
                                  const FilterParamGrid& grid, int rank) {
    const int total = static_cast<int>(x_traj.rows());
    if (total < 8) throw input_error("select_filter_params: trajectory too short");
    const int half = total / 2;

    PointMatrix x_fit = x_traj.topRows(half);
    PointMatrix y_fit = y_traj.topRows(half);
    const double med_x = median_bandwidth(PointMatrix(x_fit.topRows(half - 1)));
    const double med_y = median_bandwidth(PointMatrix(y_fit.topRows(half - 1)));

    FilterParams best;
    double best_score = std::numeric_limits<double>::infinity();
    for (double beta : grid.betas) {
        Kernel kx = Kernel::gaussian(beta * med_x);
        Kernel ky = Kernel::gaussian(beta * med_y);
        for (double eps : grid.eps_values) {
            RegularizationSchedule sched = RegularizationSchedule::coupled(eps);
            double score = 0.0;
            try {
                FilterModel model =
                    filter_train(x_fit, y_fit, kx, ky, sched, rank);
                FilterState state =
                    filter_init(model, y_traj.row(half).transpose());
                int count = 0;
                for (int t = half; t + 1 < total; ++t) {
                    if (t > half) {
                        state = filter_step(model, state,
                                            y_traj.row(t).transpose());
                    }
                    Point est = filter_point_estimate(model, state);
                    score += (est - Point(x_traj.row(t).transpose()))
                                 .squaredNorm();
                    ++count;
                }
                score /= std::max(count, 1);
            } catch (const std::exception&) {
                continue;  // unstable grid point
            }
            if (score < best_score) {
                best_score = score;
                best = FilterParams{beta, eps, 2.0 * eps};
            }
        }
    }
    if (!std::isfinite(best_score))
        throw numeric_error("select_filter_params: every grid point failed");
    return best;
}

}  // namespace kbr
