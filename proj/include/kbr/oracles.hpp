#ifndef KBR_ORACLES_HPP
#define KBR_ORACLES_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "kbr/rng.hpp"
#include "kbr/types.hpp"

namespace kbr::oracles {

// Jointly Gaussian (X, Y) in R^d x R^d with mean (0, 1_d) and covariance
// V = A^T A + 2I drawn per run (A is 2d x 2d standard normal, so V is the
// joint covariance). The prior is N(0, V_XX / 2).
struct GaussianJointConfig {
    int d;
    Vector mean;       // length 2d: (0, 1_d)
    Matrix V;          // 2d x 2d
    Matrix prior_cov;  // V_XX / 2
    std::uint64_t rng_seed;

    Matrix V_XX() const { return V.topLeftCorner(d, d); }
    Matrix V_XY() const { return V.topRightCorner(d, d); }
    Matrix V_YX() const { return V.bottomLeftCorner(d, d); }
    Matrix V_YY() const { return V.bottomRightCorner(d, d); }

    static GaussianJointConfig draw(int d, std::uint64_t seed);
};

// Exact posterior mean of X given Y = y under prior N(0, V_XX/2) and the
// likelihood Y | X = x ~ N(m_Y + V_YX V_XX^{-1} x, V_YY - V_YX V_XX^{-1} V_XY).
Point gaussian_conjugate_posterior_mean(const GaussianJointConfig& cfg,
                                        const Point& y);

// Conditional mean and covariance of Y given X = x under the joint.
Point gaussian_likelihood_mean(const GaussianJointConfig& cfg, const Point& x);
Matrix gaussian_likelihood_cov(const GaussianJointConfig& cfg);

// Samples z ~ N(mean, cov) via the Cholesky factor.
Point sample_gaussian(const Vector& mean, const Matrix& cov, Rng& rng);

// Rotation-on-the-circle synthetic dynamics. Preset (a): eta=0.3, b=0;
// preset (b): eta=0.4, b=0.4, M=8; both with sigma_h = sigma_o = 0.2.
struct RotationDynamicsConfig {
    double eta;
    double b;
    int M;
    double sigma_h;
    double sigma_o;

    static RotationDynamicsConfig preset_a() { return {0.3, 0.0, 0, 0.2, 0.2}; }
    static RotationDynamicsConfig preset_b() { return {0.4, 0.4, 8, 0.2, 0.2}; }
    static RotationDynamicsConfig preset(char which);
};

struct Trajectory {
    PointMatrix states;        // T x 2
    PointMatrix observations;  // T x 2
};

Trajectory simulate_rotation(const RotationDynamicsConfig& cfg, int T,
                             std::uint64_t seed);

// x_{t+1} = A x_t + w, y_t = H x_t + v.
struct LinearModel {
    Matrix A, H, Q, R;
    Vector m0;
    Matrix P0;
};

struct KalmanEstimate {
    std::vector<Vector> means;
    std::vector<Matrix> covs;
};

KalmanEstimate kalman_filter_oracle(const LinearModel& model,
                                    const PointMatrix& observations);

}  // namespace kbr::oracles

#endif
