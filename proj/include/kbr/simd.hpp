#ifndef KBR_SIMD_HPP
#define KBR_SIMD_HPP

#include <cstddef>

// Data-parallel inner loops behind Gram-matrix evaluation. Each routine has a
// scalar reference implementation and an AVX2+FMA variant; the active variant
// is selected once at startup from CPUID. The variants are equivalence-tested
// against each other in tests/test_simd.cpp.
namespace kbr::simd {

// dst[j] = sum_k (x[k] - Z[j*ld + k])^2  for j in [0, m).  Z is row-major.
using squared_dist_row_fn = void (*)(const double* x, const double* Z,
                                     std::size_t m, std::size_t d,
                                     std::size_t ld, double* dst);

// dst[j] = sum_k x[k] * Z[j*ld + k]
using dot_row_fn = void (*)(const double* x, const double* Z, std::size_t m,
                            std::size_t d, std::size_t ld, double* dst);

extern const squared_dist_row_fn squared_dist_row;
extern const dot_row_fn dot_row;

namespace scalar {
void squared_dist_row(const double* x, const double* Z, std::size_t m,
                      std::size_t d, std::size_t ld, double* dst);
void dot_row(const double* x, const double* Z, std::size_t m, std::size_t d,
             std::size_t ld, double* dst);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void squared_dist_row(const double* x, const double* Z, std::size_t m,
                      std::size_t d, std::size_t ld, double* dst);
void dot_row(const double* x, const double* Z, std::size_t m, std::size_t d,
             std::size_t ld, double* dst);
}  // namespace avx2
#endif

// "avx2" or "scalar"
const char* active_backend();

}  // namespace kbr::simd

#endif
