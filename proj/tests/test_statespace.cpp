#include <cmath>

#include <doctest.h>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "kbr/kbr.hpp"
#include "kbr/oracles.hpp"
#include "kbr/rng.hpp"
#include "kbr/statespace.hpp"

using namespace kbr;

namespace {

PointMatrix random_points(int n, int d, Rng& rng) {
    PointMatrix pts(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) pts(i, j) = rng.gaussian();
    return pts;
}

FilterModel small_model(int T, int d, std::uint64_t seed, double eps = 0.01) {
    Rng rng(seed);
    PointMatrix x = random_points(T + 1, d, rng);
    PointMatrix y = random_points(T + 1, d, rng);
    return filter_train(x, y, Kernel::gaussian(1.0), Kernel::gaussian(1.0),
                        RegularizationSchedule(eps, 2.0 * eps));
}

}  // namespace

TEST_CASE("filter_train builds the stated matrices on a T=2 toy trajectory") {
    PointMatrix x(3, 1), y(3, 1);
    x << 0.0, 1.0, 2.0;
    y << 0.5, -0.5, 1.5;
    Kernel k = Kernel::gaussian(1.0);
    FilterModel m = filter_train(x, y, k, k, RegularizationSchedule(0.01, 0.02));
    REQUIRE(m.T() == 2);
    // G_X over X_1..X_2, transfer matrix pairs X_i with X_{j+1}.
    CHECK(m.G_X(0, 1) == doctest::Approx(k(x.row(0).transpose(), x.row(1).transpose())));
    CHECK(m.G_Y(0, 1) == doctest::Approx(k(y.row(0).transpose(), y.row(1).transpose())));
    CHECK(m.G_XXp(0, 0) ==
          doctest::Approx(k(x.row(0).transpose(), x.row(1).transpose())));
    CHECK(m.G_XXp(0, 1) ==
          doctest::Approx(k(x.row(0).transpose(), x.row(2).transpose())));
    CHECK(m.G_XXp(1, 1) ==
          doctest::Approx(k(x.row(1).transpose(), x.row(2).transpose())));
}

TEST_CASE("filter_train rejects too-short trajectories") {
    PointMatrix x(2, 1), y(2, 1);
    x << 0, 1;
    y << 0, 1;
    Kernel k = Kernel::gaussian(1.0);
    CHECK_THROWS_AS(filter_train(x, y, k, k, RegularizationSchedule(0.01, 0.02)),
                    input_error);
}

TEST_CASE("filter_train gram matrices are PSD on a linear-Gaussian trajectory") {
    Rng rng(12);
    const int T = 40;
    PointMatrix x(T + 1, 2), y(T + 1, 2);
    Point state = Point::Zero(2);
    for (int t = 0; t <= T; ++t) {
        x.row(t) = state.transpose();
        y.row(t) = (state + 0.1 * rng.gaussian_vector(2)).transpose();
        state = 0.9 * state + 0.3 * rng.gaussian_vector(2);
    }
    FilterModel m = filter_train(x, y, Kernel::gaussian(1.0), Kernel::gaussian(1.0),
                                 RegularizationSchedule(0.01, 0.02));
    for (const Matrix* G : {&m.G_X, &m.G_Y}) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(*G);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8 * T);
    }
}

TEST_CASE("repeated identical state gives an all-ones G_X") {
    PointMatrix x = PointMatrix::Zero(4, 2);
    Rng rng(3);
    PointMatrix y = random_points(4, 2, rng);
    FilterModel m = filter_train(x, y, Kernel::gaussian(1.0), Kernel::gaussian(1.0),
                                 RegularizationSchedule(0.01, 0.02));
    CHECK((m.G_X - Matrix::Ones(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((m.G_XXp - Matrix::Ones(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("filter_init matches the dense solve on T=2") {
    FilterModel m = small_model(2, 1, 21);
    Point y1(1);
    y1 << 0.25;
    FilterState s = filter_init(m, y1);
    const int T = m.T();
    Vector expect = static_cast<double>(T) *
                    (m.G_Y + T * m.schedule.eps * Matrix::Identity(T, T))
                        .partialPivLu()
                        .solve(kernel_vector(m.ky, m.y_train, y1));
    CHECK((s.alpha - expect).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(s.t == 1);

    FilterState unscaled = filter_init(m, y1, false);
    CHECK((s.alpha - static_cast<double>(T) * unscaled.alpha).cwiseAbs().maxCoeff() <
          1e-10);
}

TEST_CASE("filter_init concentrates on the matching observation") {
    Rng rng(33);
    const int T = 6;
    PointMatrix x = random_points(T + 1, 1, rng);
    PointMatrix y(T + 1, 1);
    for (int t = 0; t <= T; ++t) y(t, 0) = 10.0 * t;  // far apart
    FilterModel m = filter_train(x, y, Kernel::gaussian(1.0), Kernel::gaussian(1.0),
                                 RegularizationSchedule(0.01, 0.02));
    FilterState s = filter_init(m, y.row(0).transpose());
    int argmax = 0;
    s.alpha.cwiseAbs().maxCoeff(&argmax);
    CHECK(argmax == 0);
}

TEST_CASE("filter_init with a near-constant kernel gives equal weights") {
    FilterModel m = small_model(5, 1, 40);
    m.ky = Kernel::gaussian(1e6);
    m.G_Y = gram_matrix(m.ky, m.y_train);
    Point y1(1);
    y1 << 0.0;
    FilterState s = filter_init(m, y1);
    for (int i = 1; i < m.T(); ++i)
        CHECK(s.alpha(i) == doctest::Approx(s.alpha(0)).epsilon(1e-6));
}

TEST_CASE("filter_predict matches the Eq. 16 dense oracle") {
    FilterModel m = small_model(2, 1, 55);
    FilterState s;
    s.alpha = Vector::Zero(2);
    CHECK(filter_predict(m, s).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    Rng rng(56);
    s.alpha = rng.gaussian_vector(2);
    const int T = m.T();
    Matrix A = m.G_X + T * m.schedule.eps * Matrix::Identity(T, T);
    Vector expect =
        A.partialPivLu().solve(m.G_XXp * A.partialPivLu().solve(m.G_X * s.alpha));
    CHECK((filter_predict(m, s) - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("identity dynamics reduce prediction to one smoothing step") {
    Rng rng(61);
    const int T = 10;
    // A constant trajectory makes X_{t+1} = X_t exact, so G_XXp = G_X.
    PointMatrix x(T + 1, 2);
    PointMatrix base = random_points(1, 2, rng);
    for (int t = 0; t <= T; ++t) x.row(t) = base.row(0);
    PointMatrix y = random_points(T + 1, 2, rng);
    FilterModel m = filter_train(x, y, Kernel::gaussian(1.0), Kernel::gaussian(1.0),
                                 RegularizationSchedule(0.01, 0.02));
    FilterState s;
    s.alpha = rng.gaussian_vector(T);
    Matrix A = m.G_X + T * m.schedule.eps * Matrix::Identity(T, T);
    Vector smoothing = A.partialPivLu().solve(m.G_X * s.alpha);
    Vector mu = filter_predict(m, s);
    // G_XXp == G_X here, so Eq. 16 collapses to one extra smoothing solve.
    Vector expect = A.partialPivLu().solve(m.G_X * smoothing);
    CHECK((mu - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("filter_update matches the Eq. 17 dense oracle") {
    FilterModel m = small_model(2, 1, 77);
    Rng rng(78);
    Vector mu = rng.gaussian_vector(2);
    Point y_new(1);
    y_new << 0.4;
    FilterState s = filter_update(m, mu, y_new, 3);
    CHECK(s.t == 4);
    Vector expect = kbr_weight_action(mu, m.G_Y, m.schedule.delta,
                                      kernel_vector(m.ky, m.y_train, y_new));
    CHECK((s.alpha - expect).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("filter_update shares the KBR scale invariance") {
    FilterModel m = small_model(8, 2, 90);
    Rng rng(91);
    Vector mu = rng.gaussian_vector(8);
    Point y_new = rng.gaussian_vector(2);
    FilterState base = filter_update(m, mu, y_new);
    for (double c : {0.1, 10.0}) {
        FilterModel scaled = m;
        scaled.schedule = RegularizationSchedule(m.schedule.eps,
                                                 c * c * m.schedule.delta);
        FilterState got = filter_update(scaled, c * mu, y_new);
        CHECK((got.alpha - base.alpha).cwiseAbs().maxCoeff() <=
              1e-8 * (1.0 + base.alpha.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("one filter step equals the posterior operator applied directly") {
    FilterModel m = small_model(12, 2, 100);
    Rng rng(101);
    FilterState s = filter_init(m, m.y_train.row(0).transpose());
    Point y_new = rng.gaussian_vector(2);
    Vector mu = filter_predict(m, s);
    FilterState next = filter_update(m, mu, y_new, s.t);

    // The same update written as a generic KBR posterior: Lambda = diag(mu)
    // on the training joint sample.
    Vector expect = kbr_weight_action(mu, m.G_Y, m.schedule.delta,
                                      kernel_vector(m.ky, m.y_train, y_new));
    CHECK((next.alpha - expect).cwiseAbs().maxCoeff() < 1e-10);

    FilterState stepped = filter_step(m, s, y_new);
    CHECK((stepped.alpha - next.alpha).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(stepped.t == s.t + 1);
}

TEST_CASE("filter point estimates") {
    FilterModel m = small_model(5, 2, 110);
    FilterState s;
    s.alpha = Vector::Zero(5);
    s.alpha(1) = 1.0;
    Point est = filter_point_estimate(m, s);
    CHECK((est - m.x_train.row(1).transpose()).norm() < 1e-10);

    // Symmetric two-point weights: weighted mean is the midpoint.
    PointMatrix x(4, 1), y(4, 1);
    x << -1.0, 1.0, 5.0, 6.0;
    y << 0, 1, 2, 3;
    FilterModel m2 = filter_train(x, y, Kernel::gaussian(1.0), Kernel::gaussian(1.0),
                                  RegularizationSchedule(0.01, 0.02));
    FilterState s2;
    s2.alpha = Vector::Zero(3);
    s2.alpha(0) = 0.5;
    s2.alpha(1) = 0.5;
    Point mean_est = filter_point_estimate(m2, s2, false);
    CHECK(mean_est(0) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("low-rank filtering matches dense on point estimates") {
    oracles::RotationDynamicsConfig cfg = oracles::RotationDynamicsConfig::preset_a();
    oracles::Trajectory train = oracles::simulate_rotation(cfg, 151, 7);
    oracles::Trajectory test = oracles::simulate_rotation(cfg, 60, 8);
    Kernel k = Kernel::gaussian(1.0);
    RegularizationSchedule sched(1e-3, 2e-3);
    FilterModel dense = filter_train(train.states, train.observations, k, k, sched);
    FilterModel low =
        filter_train(train.states, train.observations, k, k, sched, 50);
    CHECK(low.lowrank);

    auto run = [&](const FilterModel& m) {
        FilterState s = filter_init(m, test.observations.row(0).transpose());
        double mse = 0.0;
        for (int t = 1; t < 60; ++t) {
            s = filter_step(m, s, test.observations.row(t).transpose());
            Point est = filter_point_estimate(m, s);
            mse += (est - test.states.row(t).transpose()).squaredNorm();
        }
        return mse / 59.0;
    };
    double mse_dense = run(dense), mse_low = run(low);
    CHECK(mse_low <= 1.10 * mse_dense + 1e-6);
    CHECK(mse_low >= 0.0);
}

TEST_CASE("alpha stays finite over long filtering runs") {
    oracles::RotationDynamicsConfig cfg = oracles::RotationDynamicsConfig::preset_b();
    oracles::Trajectory train = oracles::simulate_rotation(cfg, 101, 17);
    oracles::Trajectory test = oracles::simulate_rotation(cfg, 1000, 18);
    Kernel k = Kernel::gaussian(1.0);
    FilterModel m = filter_train(train.states, train.observations, k, k,
                                 RegularizationSchedule(1e-3, 2e-3));
    FilterState s = filter_init(m, test.observations.row(0).transpose());
    for (int t = 1; t < 1000; ++t) {
        s = filter_step(m, s, test.observations.row(t).transpose());
        REQUIRE(s.alpha.allFinite());
    }
}

TEST_CASE("ekf equals the Kalman oracle on linear dynamics") {
    Rng rng(130);
    oracles::LinearModel lin;
    lin.A = Matrix(2, 2);
    lin.A << 0.9, 0.1, -0.1, 0.8;
    lin.H = Matrix::Identity(2, 2);
    lin.Q = 0.05 * Matrix::Identity(2, 2);
    lin.R = 0.1 * Matrix::Identity(2, 2);
    lin.m0 = Vector::Zero(2);
    lin.P0 = Matrix::Identity(2, 2);

    const int T = 30;
    PointMatrix obs(T, 2);
    Point state = Point::Zero(2);
    for (int t = 0; t < T; ++t) {
        state = lin.A * state + 0.2 * rng.gaussian_vector(2);
        obs.row(t) = (lin.H * state + 0.3 * rng.gaussian_vector(2)).transpose();
    }
    oracles::KalmanEstimate kf = oracles::kalman_filter_oracle(lin, obs);

    DifferentiableModel dm;
    dm.f = [&lin](const Point& x) { return Point(lin.A * x); };
    dm.h = [&lin](const Point& x) { return Point(lin.H * x); };
    dm.F = [&lin](const Point&) { return lin.A; };
    dm.H = [&lin](const Point&) { return lin.H; };
    dm.Q = lin.Q;
    dm.R = lin.R;

    EkfState es{lin.m0, lin.P0};
    for (int t = 0; t < T; ++t) {
        es = ekf_step(dm, es, obs.row(t).transpose());
        CHECK((es.mean - kf.means[t]).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((es.cov - kf.covs[t]).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("ekf with zero noise and exact model drives the error to zero") {
    DifferentiableModel dm;
    Matrix A(1, 1);
    A << 0.5;
    dm.f = [A](const Point& x) { return Point(A * x); };
    dm.h = [](const Point& x) { return x; };
    dm.F = [A](const Point&) { return A; };
    dm.H = [](const Point&) { return Matrix::Identity(1, 1); };
    dm.Q = 1e-12 * Matrix::Identity(1, 1);
    dm.R = 1e-12 * Matrix::Identity(1, 1);

    Point truth(1);
    truth << 1.0;
    EkfState s{Point::Zero(1), Matrix::Identity(1, 1)};
    for (int t = 0; t < 20; ++t) {
        truth = A * truth;
        s = ekf_step(dm, s, truth);
    }
    CHECK((s.mean - truth).norm() < 1e-8);
}

TEST_CASE("ekf is stable on the rotation dynamics over 1000 steps") {
    oracles::RotationDynamicsConfig cfg = oracles::RotationDynamicsConfig::preset_a();
    oracles::Trajectory traj = oracles::simulate_rotation(cfg, 1000, 99);

    DifferentiableModel dm;
    dm.f = [&cfg](const Point& x) {
        double theta = std::atan2(x(1), x(0)) + cfg.eta;
        double radius = 1.0 + cfg.b * std::sin(cfg.M * theta);
        Point out(2);
        out << radius * std::cos(theta), radius * std::sin(theta);
        return out;
    };
    dm.h = [](const Point& x) { return x; };
    dm.F = [&cfg](const Point& x) {
        double r2 = x.squaredNorm();
        double theta = std::atan2(x(1), x(0)) + cfg.eta;
        double radius = 1.0 + cfg.b * std::sin(cfg.M * theta);
        double dr = cfg.b * cfg.M * std::cos(cfg.M * theta);
        Point df(2);
        df << dr * std::cos(theta) - radius * std::sin(theta),
            dr * std::sin(theta) + radius * std::cos(theta);
        Point dtheta(2);
        dtheta << -x(1) / r2, x(0) / r2;
        return Matrix(df * dtheta.transpose());
    };
    dm.H = [](const Point&) { return Matrix::Identity(2, 2); };
    dm.Q = cfg.sigma_h * cfg.sigma_h * Matrix::Identity(2, 2);
    dm.R = cfg.sigma_o * cfg.sigma_o * Matrix::Identity(2, 2);

    EkfState s{traj.observations.row(0).transpose(), Matrix::Identity(2, 2)};
    double mse = 0.0;
    for (int t = 1; t < 1000; ++t) {
        s = ekf_step(dm, s, traj.observations.row(t).transpose());
        REQUIRE(s.mean.allFinite());
        mse += (s.mean - traj.states.row(t).transpose()).squaredNorm();
    }
    mse /= 999.0;
    CHECK(mse < 1.0);
}

TEST_CASE("validation-split parameter selection returns a grid member") {
    oracles::RotationDynamicsConfig cfg = oracles::RotationDynamicsConfig::preset_a();
    oracles::Trajectory traj = oracles::simulate_rotation(cfg, 81, 41);
    FilterParamGrid grid;
    grid.betas = {0.5, 1.0, 2.0};
    grid.eps_values = {1e-3, 1e-2};
    FilterParams p = select_filter_params(traj.states, traj.observations, grid);
    bool beta_ok = false, eps_ok = false;
    for (double b : grid.betas) beta_ok = beta_ok || b == p.beta;
    for (double e : grid.eps_values) eps_ok = eps_ok || e == p.eps;
    CHECK(beta_ok);
    CHECK(eps_ok);
    CHECK(p.delta == doctest::Approx(2.0 * p.eps));
}
