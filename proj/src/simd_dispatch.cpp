#include "kbr/simd.hpp"

namespace kbr::simd {

namespace {

bool have_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const bool use_avx2 = have_avx2();

}  // namespace

#if defined(__x86_64__) || defined(_M_X64)
const squared_dist_row_fn squared_dist_row =
    use_avx2 ? avx2::squared_dist_row : scalar::squared_dist_row;
const dot_row_fn dot_row = use_avx2 ? avx2::dot_row : scalar::dot_row;
#else
const squared_dist_row_fn squared_dist_row = scalar::squared_dist_row;
const dot_row_fn dot_row = scalar::dot_row;
#endif

const char* active_backend() { return use_avx2 ? "avx2" : "scalar"; }

}  // namespace kbr::simd
