#ifndef KBR_TYPES_HPP
#define KBR_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace kbr {

using Point = Eigen::VectorXd;
// Rows are points. Row-major so each point is contiguous in memory,
// which the distance kernels in simd.hpp rely on.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct degenerate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline PointMatrix as_point_matrix(const Point& p) {
    PointMatrix m(1, p.size());
    m.row(0) = p.transpose();
    return m;
}

}  // namespace kbr

#endif
