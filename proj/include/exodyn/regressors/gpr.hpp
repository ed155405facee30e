#pragma once

#include <Eigen/Cholesky>

#include "exodyn/model.hpp"

namespace exodyn {

// Exact Gaussian process regression with the composite kernel. Channels
// share the training inputs and Cholesky factor; only alpha differs.
// Predictive variance evaluates the prior at the query without the white
// term, per the diagonal-only white-noise convention.
class GprModel final : public FamilyModel {
  public:
    Matrix X;      // standardized training inputs
    Matrix alpha;  // n x L, K^-1 Y
    double jitter = 0.0;
    CompositeKernelParams kernel;
    Eigen::LLT<Matrix> llt;  // rebuilt deterministically on load

    Family family() const override { return Family::GPR; }
    int output_dim() const override { return static_cast<int>(alpha.cols()); }

    Vector query_cov(const Vector& xs) const {
        Vector k(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            k(i) = composite_kernel(X.row(i).transpose(), xs, kernel, false);
        return k;
    }

    Vector predict_std(const Vector& xs) const override {
        return alpha.transpose() * query_cov(xs);
    }

    Matrix predict_std_batch(const Matrix& Xs) const override {
        return cross_kernel(X, Xs, kernel).transpose() * alpha;
    }

    Vector predict_variance_std(const Vector& xs) const override {
        const Vector k = query_cov(xs);
        const Vector v = llt.matrixL().solve(k);
        const double prior = composite_kernel(xs, xs, kernel, false);
        return Vector::Constant(output_dim(), prior - v.squaredNorm());
    }

    void factorize() {
        Matrix K = kernel_matrix(X, kernel);
        K.diagonal().array() += jitter;
        llt.compute(K);
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefinite("GPR kernel matrix failed Cholesky at stored jitter");
    }

    json payload_json() const override {
        return json{{"X", matrix_json(X)}, {"alpha", matrix_json(alpha)}, {"jitter", jitter}};
    }
};

inline std::shared_ptr<FamilyModel> fit_gpr(const Matrix& Xs, const Matrix& Y,
                                            const ModelSpec& spec) {
    const auto& hp = spec.hp.gpr;
    if (Xs.rows() > hp.max_rows)
        throw CapExceeded("GPR training set has " + std::to_string(Xs.rows()) +
                          " rows, cap is " + std::to_string(hp.max_rows));
    auto m = std::make_shared<GprModel>();
    m->X = Xs;
    m->kernel = hp.kernel;

    Matrix K = kernel_matrix(Xs, hp.kernel);
    double jitter = 0.0;
    m->llt.compute(K);
    if (m->llt.info() != Eigen::Success) {
        for (jitter = hp.jitter_start; jitter <= hp.jitter_max; jitter *= 10.0) {
            Matrix Kj = K;
            Kj.diagonal().array() += jitter;
            m->llt.compute(Kj);
            if (m->llt.info() == Eigen::Success) break;
        }
        if (m->llt.info() != Eigen::Success)
            throw NotPositiveDefinite("GPR kernel matrix not positive definite up to jitter " +
                                      std::to_string(hp.jitter_max));
    }
    m->jitter = jitter;
    m->alpha = m->llt.solve(Y);
    return m;
}

}  // namespace exodyn
