#ifndef KBR_STATESPACE_HPP
#define KBR_STATESPACE_HPP

#include <functional>
#include <vector>

#include "kbr/kbr.hpp"

namespace kbr {

// Nonparametric state-space model trained from one trajectory of (state,
// observation) pairs. G_X, G_Y span X_1..X_T / Y_1..Y_T; the transfer matrix
// has entries k_X(X_i, X_{j+1}).
struct FilterModel {
    FilterModel(Kernel kx_, Kernel ky_, RegularizationSchedule schedule_)
        : kx(std::move(kx_)), ky(std::move(ky_)), schedule(schedule_) {}

    PointMatrix x_train;  // T+1 states
    PointMatrix y_train;  // first T observations
    Matrix G_X, G_Y, G_XXp;
    Kernel kx, ky;
    RegularizationSchedule schedule;

    // Low-rank factors; gamma_x/gamma_p are row slices of one factorization
    // of the Gram matrix over all T+1 states, so G_XXp ~= gamma_x gamma_p^T.
    bool lowrank = false;
    Matrix gamma_x, gamma_p, gamma_y;

    int T() const { return static_cast<int>(y_train.rows()); }
};

struct FilterState {
    Vector alpha;
    int t = 1;
    Vector last_mu;  // predictive-step weights, kept for diagnostics
};

// rank = 0 keeps everything dense.
FilterModel filter_train(const PointMatrix& x_traj, const PointMatrix& y_traj,
                         const Kernel& kx, const Kernel& ky,
                         const RegularizationSchedule& schedule, int rank = 0);

// alpha^(1) = scale_by_T ? T (G_Y + T eps I)^{-1} k_Y(y1)
//                        :   (G_Y + T eps I)^{-1} k_Y(y1)
FilterState filter_init(const FilterModel& model, const Point& y1,
                        bool scale_by_T = true);

// Predictive weights mu^(t+1) = (G_X+TeI)^{-1} G_XXp (G_X+TeI)^{-1} G_X alpha.
Vector filter_predict(const FilterModel& model, const FilterState& state);

// KBR update with Lambda = diag(mu); increments t.
FilterState filter_update(const FilterModel& model, const Vector& mu,
                          const Point& y_new, int t_prev = 0);

// Convenience: predict + update.
FilterState filter_step(const FilterModel& model, const FilterState& state,
                        const Point& y_new);

// Point estimate of the current state: Gaussian-kernel preimage by default,
// or the plain weighted mean.
Point filter_point_estimate(const FilterModel& model, const FilterState& state,
                            bool use_preimage = true);

// One-step-ahead state prediction sum_i w_i X_{i+1} / sum_i w_i with
// w = (G_X + TeI)^{-1} G_X alpha; used by validation-split scoring.
Point filter_predicted_state(const FilterModel& model, const FilterState& state);

// --- EKF baseline ---

struct DifferentiableModel {
    std::function<Point(const Point&)> f;   // state transition
    std::function<Point(const Point&)> h;   // observation
    std::function<Matrix(const Point&)> F;  // Jacobian of f
    std::function<Matrix(const Point&)> H;  // Jacobian of h
    Matrix Q;  // process noise covariance
    Matrix R;  // observation noise covariance
};

struct EkfState {
    Point mean;
    Matrix cov;
};

EkfState ekf_step(const DifferentiableModel& model, const EkfState& state,
                  const Point& y);

// --- validation-split parameter selection ---

struct FilterParams {
    double beta = 1.0;  // bandwidth multiplier on the median heuristic
    double eps = 1e-2;
    double delta = 2e-2;
};

struct FilterParamGrid {
    std::vector<double> betas = {0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> eps_values = {1e-4, 1e-3, 1e-2, 1e-1};  // delta = 2 eps
};

// Trains on the first half of the trajectory and scores the filtered point
// estimates against the states of the second half; returns the best grid
// point. Grid points whose filter degenerates on the validation segment are
// skipped.
FilterParams select_filter_params(const PointMatrix& x_traj,
                                  const PointMatrix& y_traj,
                                  const FilterParamGrid& grid = {},
                                  int rank = 0);

}  // namespace kbr

#endif
