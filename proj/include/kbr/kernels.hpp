#ifndef KBR_KERNELS_HPP
#define KBR_KERNELS_HPP

#include <memory>
#include <string>

#include "kbr/types.hpp"

namespace kbr {

// Positive definite kernel, immutable value type. Matrix-valued points for the
// trace kernel are stored row-major as flat vectors; Tr[A B^T] is then just the
// dot product of the flattened matrices.
class Kernel {
public:
    enum class Type { gaussian_rbf, trace, product };

    static Kernel gaussian(double bandwidth);
    static Kernel trace();
    // Points for a product kernel are concatenations (x1, x2); left_dim says
    // where to split.
    static Kernel product(Kernel left, Kernel right, int left_dim);

    Type type() const { return type_; }
    double bandwidth() const { return bandwidth_; }
    int left_dim() const { return left_dim_; }
    const Kernel& left() const { return *left_; }
    const Kernel& right() const { return *right_; }

    double operator()(const Point& x, const Point& y) const;

    // Returns a copy with a different bandwidth (Gaussian only).
    Kernel with_bandwidth(double bandwidth) const;

private:
    Kernel() = default;

    Type type_ = Type::gaussian_rbf;
    double bandwidth_ = 1.0;
    int left_dim_ = 0;
    std::shared_ptr<const Kernel> left_, right_;
};

double evaluate(const Kernel& k, const Point& x, const Point& y);

// |X| x |Z| matrix of pairwise evaluations.
Matrix gram_matrix(const Kernel& k, const PointMatrix& X, const PointMatrix& Z);

// Symmetric case: the upper triangle is computed and mirrored, so the result
// is bitwise symmetric regardless of evaluation order.
Matrix gram_matrix(const Kernel& k, const PointMatrix& X);

// (k(X_i, y))_i
Vector kernel_vector(const Kernel& k, const PointMatrix& X, const Point& y);

// Kernel entry in a config file: {"type": "gaussian"|"trace"|"product",
// "bandwidth": float | "median" | "median*<factor>"}.
struct KernelSpec {
    std::string type = "gaussian";
    bool median = false;        // bandwidth from median heuristic
    double median_factor = 1.0; // multiplier on the heuristic
    double bandwidth = 1.0;     // explicit value when median == false

    static KernelSpec parse(const std::string& json_text);
    // Resolves "median" bandwidths against the data the kernel will act on.
    Kernel resolve(const PointMatrix& points) const;
};

}  // namespace kbr

#endif
