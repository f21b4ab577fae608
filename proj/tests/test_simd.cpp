#include <cstring>
#include <vector>

#include <doctest.h>

#include "kbr/rng.hpp"
#include "kbr/simd.hpp"

using namespace kbr;

TEST_CASE("scalar distance/dot loops match a naive re-implementation") {
    Rng rng(11);
    for (std::size_t d : {1u, 2u, 3u, 4u, 7u, 8u, 16u, 33u}) {
        const std::size_t m = 17;
        std::vector<double> x(d), Z(m * d), dist(m), dot(m);
        for (auto& v : x) v = rng.gaussian();
        for (auto& v : Z) v = rng.gaussian();
        simd::scalar::squared_dist_row(x.data(), Z.data(), m, d, d, dist.data());
        simd::scalar::dot_row(x.data(), Z.data(), m, d, d, dot.data());
        for (std::size_t j = 0; j < m; ++j) {
            double sd = 0.0, dp = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                double diff = x[k] - Z[j * d + k];
                sd += diff * diff;
                dp += x[k] * Z[j * d + k];
            }
            CHECK(dist[j] == doctest::Approx(sd).epsilon(1e-13));
            CHECK(dot[j] == doctest::Approx(dp).epsilon(1e-13));
        }
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variants agree with the scalar reference") {
    if (std::strcmp(simd::active_backend(), "avx2") != 0) {
        MESSAGE("AVX2 not available on this host, skipping");
        return;
    }
    Rng rng(23);
    for (std::size_t d : {1u, 2u, 4u, 5u, 8u, 13u, 64u}) {
        for (std::size_t m : {1u, 3u, 50u}) {
            std::vector<double> x(d), Z(m * d);
            for (auto& v : x) v = rng.gaussian();
            for (auto& v : Z) v = rng.gaussian();
            std::vector<double> a(m), b(m);
            simd::scalar::squared_dist_row(x.data(), Z.data(), m, d, d, a.data());
            simd::avx2::squared_dist_row(x.data(), Z.data(), m, d, d, b.data());
            for (std::size_t j = 0; j < m; ++j)
                CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-12));
            simd::scalar::dot_row(x.data(), Z.data(), m, d, d, a.data());
            simd::avx2::dot_row(x.data(), Z.data(), m, d, d, b.data());
            for (std::size_t j = 0; j < m; ++j)
                CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("strided rows are honored") {
    if (std::strcmp(simd::active_backend(), "avx2") != 0) return;
    // ld > d leaves padding between rows that must be ignored.
    const std::size_t d = 3, ld = 5, m = 4;
    std::vector<double> x = {1.0, 2.0, 3.0};
    std::vector<double> Z(m * ld, -99.0);
    Rng rng(5);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < d; ++k) Z[j * ld + k] = rng.gaussian();
    std::vector<double> a(m), b(m);
    simd::scalar::squared_dist_row(x.data(), Z.data(), m, d, ld, a.data());
    simd::avx2::squared_dist_row(x.data(), Z.data(), m, d, ld, b.data());
    for (std::size_t j = 0; j < m; ++j)
        CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-12));
}
#endif
