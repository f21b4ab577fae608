#include "kbr/simd.hpp"

namespace kbr::simd::scalar {

void squared_dist_row(const double* x, const double* Z, std::size_t m,
                      std::size_t d, std::size_t ld, double* dst) {
    for (std::size_t j = 0; j < m; ++j) {
        const double* z = Z + j * ld;
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double diff = x[k] - z[k];
            acc += diff * diff;
        }
        dst[j] = acc;
    }
}

void dot_row(const double* x, const double* Z, std::size_t m, std::size_t d,
             std::size_t ld, double* dst) {
    for (std::size_t j = 0; j < m; ++j) {
        const double* z = Z + j * ld;
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += x[k] * z[k];
        dst[j] = acc;
    }
}

}  // namespace kbr::simd::scalar
