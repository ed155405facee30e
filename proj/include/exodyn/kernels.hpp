#pragma once

#include <cmath>

#include "exodyn/types.hpp"

namespace exodyn {

// Sum of constant, Matern-1.5 and white kernels. The white term belongs on
// like-index (training diagonal) entries only; cross-covariances against
// queries never see it.
struct CompositeKernelParams {
    double constant_value = 1.0;
    double matern_length_scale = 1.0;
    double white_noise = 1.0;
    static constexpr double matern_nu = 1.5;

    void validate() const {
        if (!(matern_length_scale > 0.0))
            throw DimensionMismatch("matern length scale must be > 0");
        if (white_noise < 0.0)
            throw DimensionMismatch("white noise amplitude must be >= 0");
        if (!std::isfinite(constant_value) || !std::isfinite(matern_length_scale) ||
            !std::isfinite(white_noise))
            throw NonFiniteValue("kernel parameters must be finite");
    }
};

inline double matern15_kernel(const Vector& a, const Vector& b, double length_scale) {
    if (!(length_scale > 0.0))
        throw DimensionMismatch("matern length scale must be > 0");
    if (a.size() != b.size())
        throw DimensionMismatch("kernel arguments differ in size");
    const double r = (a - b).norm();
    const double s = std::sqrt(3.0) * r / length_scale;
    return (1.0 + s) * std::exp(-s);
}

inline double composite_kernel(const Vector& a, const Vector& b,
                               const CompositeKernelParams& p, bool on_diagonal) {
    p.validate();
    double k = p.constant_value * p.constant_value +
               matern15_kernel(a, b, p.matern_length_scale);
    if (on_diagonal) k += p.white_noise * p.white_noise;
    return k;
}

// Training Gram matrix, white noise on the diagonal.
inline Matrix kernel_matrix(const Matrix& X, const CompositeKernelParams& p) {
    p.validate();
    const Eigen::Index n = X.rows();
    Matrix K(n, n);
    const double c2 = p.constant_value * p.constant_value;
    const double w2 = p.white_noise * p.white_noise;
    const double sqrt3_over_l = std::sqrt(3.0) / p.matern_length_scale;
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = c2 + 1.0 + w2;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double s = sqrt3_over_l * (X.row(i) - X.row(j)).norm();
            const double v = c2 + (1.0 + s) * std::exp(-s);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

// Cross-covariances k(train_i, query_j); no white term.
inline Matrix cross_kernel(const Matrix& X, const Matrix& Q,
                           const CompositeKernelParams& p) {
    p.validate();
    if (X.cols() != Q.cols())
        throw DimensionMismatch("kernel arguments differ in size");
    Matrix K(X.rows(), Q.rows());
    const double c2 = p.constant_value * p.constant_value;
    const double sqrt3_over_l = std::sqrt(3.0) / p.matern_length_scale;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < Q.rows(); ++j) {
            const double s = sqrt3_over_l * (X.row(i) - Q.row(j)).norm();
            K(i, j) = c2 + (1.0 + s) * std::exp(-s);
        }
    return K;
}

}  // namespace exodyn
