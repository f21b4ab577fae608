#include "kbr/oracles.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace kbr::oracles {

GaussianJointConfig GaussianJointConfig::draw(int d, std::uint64_t seed) {
    if (d < 1) throw input_error("GaussianJointConfig: d must be >= 1");
    Rng rng = Rng(seed).substream("gaussian-model");
    const int m = 2 * d;
    Matrix A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = rng.gaussian();
    GaussianJointConfig cfg;
    cfg.d = d;
    cfg.rng_seed = seed;
    cfg.V = A.transpose() * A + 2.0 * Matrix::Identity(m, m);
    cfg.mean = Vector::Zero(m);
    cfg.mean.tail(d).setOnes();
    cfg.prior_cov = cfg.V.topLeftCorner(d, d) / 2.0;
    return cfg;
}

Point gaussian_likelihood_mean(const GaussianJointConfig& cfg, const Point& x) {
    return cfg.mean.tail(cfg.d) +
           cfg.V_YX() * cfg.V_XX().ldlt().solve(x - cfg.mean.head(cfg.d));
}

Matrix gaussian_likelihood_cov(const GaussianJointConfig& cfg) {
    return cfg.V_YY() - cfg.V_YX() * cfg.V_XX().ldlt().solve(cfg.V_XY());
}

Point gaussian_conjugate_posterior_mean(const GaussianJointConfig& cfg,
                                        const Point& y) {
    if (y.size() != cfg.d)
        throw input_error("gaussian_conjugate_posterior_mean: bad y dimension");
    // Likelihood y | x ~ N(B x + c, S); prior x ~ N(0, prior_cov).
    Matrix B = cfg.V_YX() * cfg.V_XX().ldlt().solve(Matrix::Identity(cfg.d, cfg.d));
    Vector c = cfg.mean.tail(cfg.d) - B * cfg.mean.head(cfg.d);
    Matrix S = gaussian_likelihood_cov(cfg);
    auto S_ldlt = S.ldlt();
    if (S_ldlt.info() != Eigen::Success)
        throw numeric_error("gaussian_conjugate_posterior_mean: singular covariance");
    Matrix precision = cfg.prior_cov.ldlt().solve(Matrix::Identity(cfg.d, cfg.d)) +
                       B.transpose() * S_ldlt.solve(B);
    return precision.ldlt().solve(B.transpose() * S_ldlt.solve(y - c));
}

Point sample_gaussian(const Vector& mean, const Matrix& cov, Rng& rng) {
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success)
        throw numeric_error("sample_gaussian: covariance not positive definite");
    return mean + llt.matrixL() * rng.gaussian_vector(static_cast<int>(mean.size()));
}

RotationDynamicsConfig RotationDynamicsConfig::preset(char which) {
    if (which == 'a') return preset_a();
    if (which == 'b') return preset_b();
    throw input_error("rotation preset must be 'a' or 'b'");
}

Trajectory simulate_rotation(const RotationDynamicsConfig& cfg, int T,
                             std::uint64_t seed) {
    if (T < 2) throw input_error("simulate_rotation: T must be >= 2");
    Rng rng = Rng(seed).substream("rotation");
    Trajectory traj;
    traj.states.resize(T, 2);
    traj.observations.resize(T, 2);
    double theta = 2.0 * M_PI * rng.uniform();
    for (int t = 0; t < T; ++t) {
        if (t > 0) theta = std::fmod(theta + cfg.eta, 2.0 * M_PI);
        const double radius = 1.0 + cfg.b * std::sin(cfg.M * theta);
        double u = radius * std::cos(theta) + cfg.sigma_h * rng.gaussian();
        double v = radius * std::sin(theta) + cfg.sigma_h * rng.gaussian();
        traj.states(t, 0) = u;
        traj.states(t, 1) = v;
        traj.observations(t, 0) = u + cfg.sigma_o * rng.gaussian();
        traj.observations(t, 1) = v + cfg.sigma_o * rng.gaussian();
    }
    return traj;
}

KalmanEstimate kalman_filter_oracle(const LinearModel& model,
                                    const PointMatrix& observations) {
    KalmanEstimate est;
    Vector m = model.m0;
    Matrix P = model.P0;
    const Matrix I = Matrix::Identity(m.size(), m.size());
    for (Eigen::Index t = 0; t < observations.rows(); ++t) {
        // Predict, then update; (m0, P0) describe the state before the first
        // transition, matching ekf_step.
        m = model.A * m;
        P = model.A * P * model.A.transpose() + model.Q;
        Matrix S = model.H * P * model.H.transpose() + model.R;
        auto S_ldlt = S.ldlt();
        if (S_ldlt.info() != Eigen::Success)
            throw numeric_error("kalman_filter_oracle: singular innovation covariance");
        Matrix K = S_ldlt.solve(model.H * P).transpose();
        Vector y = observations.row(t).transpose();
        m = m + K * (y - model.H * m);
        P = (I - K * model.H) * P;
        P = 0.5 * (P + P.transpose());
        est.means.push_back(m);
        est.covs.push_back(P);
    }
    return est;
}

}  // namespace kbr::oracles
