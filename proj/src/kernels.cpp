#include "kbr/kernels.hpp"

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "kbr/modelsel.hpp"
#include "kbr/simd.hpp"

namespace kbr {

Kernel Kernel::gaussian(double bandwidth) {
    if (!(bandwidth > 0.0))
        throw input_error("GaussianRBF bandwidth must be positive");
    Kernel k;
    k.type_ = Type::gaussian_rbf;
    k.bandwidth_ = bandwidth;
    return k;
}

Kernel Kernel::trace() {
    Kernel k;
    k.type_ = Type::trace;
    return k;
}

Kernel Kernel::product(Kernel left, Kernel right, int left_dim) {
    if (left_dim <= 0) throw input_error("product kernel needs left_dim > 0");
    Kernel k;
    k.type_ = Type::product;
    k.left_dim_ = left_dim;
    k.left_ = std::make_shared<const Kernel>(std::move(left));
    k.right_ = std::make_shared<const Kernel>(std::move(right));
    return k;
}

Kernel Kernel::with_bandwidth(double bandwidth) const {
    if (type_ != Type::gaussian_rbf)
        throw input_error("with_bandwidth applies to GaussianRBF only");
    return gaussian(bandwidth);
}

double Kernel::operator()(const Point& x, const Point& y) const {
    if (x.size() != y.size())
        throw input_error("kernel arguments have mismatched dimensions");
    switch (type_) {
        case Type::gaussian_rbf: {
            double d2 = (x - y).squaredNorm();
            return std::exp(-d2 / (2.0 * bandwidth_ * bandwidth_));
        }
        case Type::trace:
            // Tr[A B^T] on flattened matrices.
            return x.dot(y);
        case Type::product: {
            if (left_dim_ >= x.size())
                throw input_error("product kernel split exceeds point dimension");
            Point xl = x.head(left_dim_), xr = x.tail(x.size() - left_dim_);
            Point yl = y.head(left_dim_), yr = y.tail(y.size() - left_dim_);
            return (*left_)(xl, yl) * (*right_)(xr, yr);
        }
    }
    throw numeric_error("unreachable kernel type");
}

double evaluate(const Kernel& k, const Point& x, const Point& y) {
    return k(x, y);
}

namespace {

// One row of the Gram matrix against all of Z, using the dispatched
// data-parallel loops where the kernel allows it.
void gram_row(const Kernel& k, const Point& x, const PointMatrix& Z,
              double* dst) {
    const auto m = static_cast<std::size_t>(Z.rows());
    const auto d = static_cast<std::size_t>(Z.cols());
    const auto ld = static_cast<std::size_t>(Z.outerStride());
    switch (k.type()) {
        case Kernel::Type::gaussian_rbf: {
            simd::squared_dist_row(x.data(), Z.data(), m, d, ld, dst);
            const double scale = -1.0 / (2.0 * k.bandwidth() * k.bandwidth());
            for (std::size_t j = 0; j < m; ++j) dst[j] = std::exp(dst[j] * scale);
            return;
        }
        case Kernel::Type::trace:
            simd::dot_row(x.data(), Z.data(), m, d, ld, dst);
            return;
        case Kernel::Type::product:
            for (std::size_t j = 0; j < m; ++j)
                dst[j] = k(x, Z.row(static_cast<Eigen::Index>(j)).transpose());
            return;
    }
}

}  // namespace

Matrix gram_matrix(const Kernel& k, const PointMatrix& X, const PointMatrix& Z) {
    if (X.rows() == 0 || Z.rows() == 0)
        throw input_error("gram_matrix: empty point list");
    if (X.cols() != Z.cols())
        throw input_error("gram_matrix: point dimension mismatch");
    Matrix G(X.rows(), Z.rows());
    std::vector<double> row(static_cast<std::size_t>(Z.rows()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        gram_row(k, X.row(i).transpose(), Z, row.data());
        for (Eigen::Index j = 0; j < Z.rows(); ++j)
            G(i, j) = row[static_cast<std::size_t>(j)];
    }
    return G;
}

Matrix gram_matrix(const Kernel& k, const PointMatrix& X) {
    if (X.rows() == 0) throw input_error("gram_matrix: empty point list");
    const Eigen::Index n = X.rows();
    Matrix G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j)
            G(i, j) = k(X.row(i).transpose(), X.row(j).transpose());
        for (Eigen::Index j = 0; j < i; ++j) G(i, j) = G(j, i);
    }
    return G;
}

Vector kernel_vector(const Kernel& k, const PointMatrix& X, const Point& y) {
    if (X.cols() != y.size())
        throw input_error("kernel_vector: point dimension mismatch");
    Vector v(X.rows());
    gram_row(k, y, X, v.data());
    return v;
}

KernelSpec KernelSpec::parse(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    KernelSpec spec;
    spec.type = j.value("type", "gaussian");
    if (spec.type != "gaussian" && spec.type != "trace" && spec.type != "product")
        throw input_error("unknown kernel type: " + spec.type);
    if (j.contains("bandwidth")) {
        const auto& b = j["bandwidth"];
        if (b.is_number()) {
            spec.bandwidth = b.get<double>();
        } else {
            std::string s = b.get<std::string>();
            if (s == "median") {
                spec.median = true;
            } else if (s.rfind("median*", 0) == 0) {
                spec.median = true;
                spec.median_factor = std::stod(s.substr(7));
            } else {
                throw input_error("bad bandwidth spec: " + s);
            }
        }
    }
    return spec;
}

Kernel KernelSpec::resolve(const PointMatrix& points) const {
    if (type == "trace") return Kernel::trace();
    if (type == "product")
        throw input_error("product kernels must be built programmatically");
    double bw = median ? median_factor * median_bandwidth(points) : bandwidth;
    return Kernel::gaussian(bw);
}

}  // namespace kbr
