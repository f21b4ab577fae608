#ifndef KBR_LINALG_HPP
#define KBR_LINALG_HPP

#include <functional>
#include <vector>

#include "kbr/types.hpp"

namespace kbr {

// Tikhonov pair (eps_n, delta_n). The KBR convention couples them; callers
// that only need eps leave delta at its default.
struct RegularizationSchedule {
    double eps;
    double delta;

    RegularizationSchedule(double eps_, double delta_) : eps(eps_), delta(delta_) {
        if (!(eps > 0.0) || !(delta > 0.0))
            throw input_error("regularization constants must be positive");
    }
    static RegularizationSchedule coupled(double eps_) {
        return RegularizationSchedule(eps_, 2.0 * eps_);
    }
};

// Pivoted incomplete Cholesky factor: G ~= gamma * gamma^T.
struct LowRankFactor {
    Matrix gamma;             // n x r
    std::vector<int> pivots;  // pivot order, length r
    double residual_bound;    // trace of the unexplained diagonal

    int rank() const { return static_cast<int>(gamma.cols()); }
};

// (G + cI)^{-1} B through a Cholesky factorization. A jitter floor of 1e-12
// is added and the factorization retried if a pivot underflows.
Matrix solve_regularized(const Matrix& G, double c, const Matrix& B);
Vector solve_regularized(const Matrix& G, double c, const Vector& b);

// Greedy pivoted factorization touching O(n r) entries of G plus the diagonal.
// Largest residual diagonal first, ties to the lowest index. Stops when the
// residual trace falls to tol or the rank hits max_rank.
LowRankFactor incomplete_cholesky(const std::function<double(int, int)>& g_oracle,
                                  int n, double tol, int max_rank);

LowRankFactor incomplete_cholesky(const Matrix& G, double tol, int max_rank);

// (D_scale I + U C V)^{-1} B using only r x r factorizations. C is absorbed
// into U, so a singular C is never inverted.
Matrix solve_woodbury(double D_scale, const Matrix& U, const Matrix& C,
                      const Matrix& V, const Matrix& B);

// C-free form: (D_scale I + U V)^{-1} B.
Matrix solve_woodbury(double D_scale, const Matrix& U, const Matrix& V,
                      const Matrix& B);

}  // namespace kbr

#endif
