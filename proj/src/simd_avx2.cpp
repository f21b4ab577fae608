// Compiled with -mavx2 -mfma (see CMakeLists); only reached after the CPUID
// check in simd_dispatch.cpp.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "kbr/simd.hpp"

namespace kbr::simd::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

void squared_dist_row(const double* x, const double* Z, std::size_t m,
                      std::size_t d, std::size_t ld, double* dst) {
    for (std::size_t j = 0; j < m; ++j) {
        const double* z = Z + j * ld;
        __m256d acc = _mm256_setzero_pd();
        std::size_t k = 0;
        for (; k + 4 <= d; k += 4) {
            __m256d xv = _mm256_loadu_pd(x + k);
            __m256d zv = _mm256_loadu_pd(z + k);
            __m256d diff = _mm256_sub_pd(xv, zv);
            acc = _mm256_fmadd_pd(diff, diff, acc);
        }
        double tail = 0.0;
        for (; k < d; ++k) {
            double diff = x[k] - z[k];
            tail += diff * diff;
        }
        dst[j] = hsum(acc) + tail;
    }
}

void dot_row(const double* x, const double* Z, std::size_t m, std::size_t d,
             std::size_t ld, double* dst) {
    for (std::size_t j = 0; j < m; ++j) {
        const double* z = Z + j * ld;
        __m256d acc = _mm256_setzero_pd();
        std::size_t k = 0;
        for (; k + 4 <= d; k += 4) {
            __m256d xv = _mm256_loadu_pd(x + k);
            __m256d zv = _mm256_loadu_pd(z + k);
            acc = _mm256_fmadd_pd(xv, zv, acc);
        }
        double tail = 0.0;
        for (; k < d; ++k) tail += x[k] * z[k];
        dst[j] = hsum(acc) + tail;
    }
}

}  // namespace kbr::simd::avx2

#endif
