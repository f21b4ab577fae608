#include <cmath>

#include <doctest.h>

#include "kbr/kernels.hpp"
#include "kbr/rng.hpp"

using namespace kbr;

namespace {

PointMatrix random_points(int n, int d, Rng& rng) {
    PointMatrix pts(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) pts(i, j) = rng.gaussian();
    return pts;
}

}  // namespace

TEST_CASE("gaussian rbf pointwise values") {
    Kernel k = Kernel::gaussian(1.0);
    Point zero2 = Point::Zero(2);
    CHECK(k(zero2, zero2) == 1.0);

    Point x0(1), x1(1);
    x0 << 0.0;
    x1 << 1.0;
    CHECK(k(x0, x1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(k(x0, x1) == k(x1, x0));
}

TEST_CASE("trace kernel on identity matrices") {
    Kernel k = Kernel::trace();
    Point i2(4);
    i2 << 1, 0, 0, 1;  // I_2 flattened row-major
    CHECK(k(i2, i2) == doctest::Approx(2.0));
}

TEST_CASE("kernel rejects dimension mismatch") {
    Kernel k = Kernel::gaussian(1.0);
    CHECK_THROWS_AS(k(Point::Zero(2), Point::Zero(3)), input_error);
}

TEST_CASE("gram matrix small cases") {
    Kernel k = Kernel::gaussian(1.0);
    PointMatrix one(1, 2);
    one << 0.3, -0.7;
    Matrix G1 = gram_matrix(k, one);
    CHECK(G1.rows() == 1);
    CHECK(G1(0, 0) == doctest::Approx(1.0));

    PointMatrix twin(2, 2);
    twin << 1.0, 2.0, 1.0, 2.0;
    Matrix G2 = gram_matrix(k, twin);
    CHECK((G2 - Matrix::Ones(2, 2)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    PointMatrix zo(2, 1);
    zo << 0.0, 1.0;
    Matrix G3 = gram_matrix(k, zo);
    CHECK(G3(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(G3(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("gram matrix rejects empty input") {
    Kernel k = Kernel::gaussian(1.0);
    PointMatrix empty(0, 2);
    CHECK_THROWS_AS(gram_matrix(k, empty), input_error);
}

TEST_CASE("symmetric gram is bitwise symmetric and PSD") {
    Rng rng(42);
    for (int n : {20, 100, 200}) {
        PointMatrix pts = random_points(n, 3, rng);
        Matrix G = gram_matrix(Kernel::gaussian(0.8), pts);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(G(i, j) == G(j, i));
        Eigen::SelfAdjointEigenSolver<Matrix> es(G);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8 * n);
    }
}

TEST_CASE("product kernel factorizes") {
    Kernel k1 = Kernel::gaussian(1.0);
    Kernel k2 = Kernel::gaussian(2.0);
    Kernel prod = Kernel::product(k1, k2, 2);
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Point x = rng.gaussian_vector(5), y = rng.gaussian_vector(5);
        double expected = k1(x.head(2), y.head(2)) * k2(x.tail(3), y.tail(3));
        CHECK(prod(x, y) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("rectangular gram matches pointwise evaluation") {
    Rng rng(3);
    PointMatrix X = random_points(7, 4, rng);
    PointMatrix Z = random_points(5, 4, rng);
    for (Kernel k : {Kernel::gaussian(1.3), Kernel::trace()}) {
        Matrix G = gram_matrix(k, X, Z);
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 5; ++j)
                CHECK(G(i, j) ==
                      doctest::Approx(k(X.row(i).transpose(), Z.row(j).transpose()))
                          .epsilon(1e-12));
        Vector v = kernel_vector(k, X, Z.row(0).transpose());
        CHECK((v - G.col(0)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("bandwidth must be positive") {
    CHECK_THROWS_AS(Kernel::gaussian(0.0), input_error);
    CHECK_THROWS_AS(Kernel::gaussian(-1.0), input_error);
}

TEST_CASE("kernel spec parsing") {
    KernelSpec s1 = KernelSpec::parse(R"({"type":"gaussian","bandwidth":2.5})");
    CHECK(s1.type == "gaussian");
    CHECK(!s1.median);
    CHECK(s1.bandwidth == doctest::Approx(2.5));

    KernelSpec s2 = KernelSpec::parse(R"({"type":"gaussian","bandwidth":"median"})");
    CHECK(s2.median);
    CHECK(s2.median_factor == doctest::Approx(1.0));

    KernelSpec s3 = KernelSpec::parse(R"({"type":"gaussian","bandwidth":"median*0.5"})");
    CHECK(s3.median);
    CHECK(s3.median_factor == doctest::Approx(0.5));

    KernelSpec s4 = KernelSpec::parse(R"({"type":"trace"})");
    CHECK(s4.type == "trace");

    CHECK_THROWS_AS(KernelSpec::parse(R"({"type":"sparse"})"), input_error);
    CHECK_THROWS_AS(KernelSpec::parse(R"({"type":"gaussian","bandwidth":"med"})"),
                    input_error);

    PointMatrix pts(3, 1);
    pts << 0.0, 1.0, 3.0;
    Kernel k = s3.resolve(pts);  // median distance 2, halved
    CHECK(k.bandwidth() == doctest::Approx(1.0));
}
