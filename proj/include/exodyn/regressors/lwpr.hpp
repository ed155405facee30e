#pragma once

#include <vector>

#include "exodyn/model.hpp"

namespace exodyn {

// Locally weighted regression with Gaussian receptive fields. The distance
// metric D = r*I stays fixed; local parameters come from batch weighted
// least squares. Prediction blends local models with normalized activations.
class LwprModel final : public FamilyModel {
  public:
    Matrix centers;               // R x d
    std::vector<Matrix> thetas;   // per field, (d+1) x L; bias row last
    double radius = 1.0;

    Family family() const override { return Family::LWPR; }
    int output_dim() const override {
        return thetas.empty() ? 0 : static_cast<int>(thetas.front().cols());
    }

    // raw Gaussian activation of one field
    double activation(int field, const Vector& xs) const {
        const double d2 = (xs - centers.row(field).transpose()).squaredNorm() * radius;
        return std::exp(-0.5 * d2);
    }

    // normalized blending weights; shifted in log space so far-away queries
    // with all activations underflowing still normalize cleanly
    Vector blend_weights(const Vector& xs) const {
        Vector lw(centers.rows());
        for (Eigen::Index k = 0; k < centers.rows(); ++k)
            lw(k) = -0.5 * radius * (xs - centers.row(k).transpose()).squaredNorm();
        Vector w = (lw.array() - lw.maxCoeff()).exp();
        return w / w.sum();
    }

    Vector predict_std(const Vector& xs) const override {
        const Vector w = blend_weights(xs);
        Vector out = Vector::Zero(output_dim());
        Vector aug(xs.size() + 1);
        for (Eigen::Index k = 0; k < centers.rows(); ++k) {
            aug.head(xs.size()) = xs - centers.row(k).transpose();
            aug(xs.size()) = 1.0;
            out += w(k) * (thetas[static_cast<std::size_t>(k)].transpose() * aug);
        }
        return out;
    }

    json payload_json() const override {
        json fields = json::array();
        for (const Matrix& th : thetas) fields.push_back(matrix_json(th));
        return json{{"centers", matrix_json(centers)}, {"thetas", std::move(fields)},
                    {"radius", radius}};
    }
};

inline std::shared_ptr<FamilyModel> fit_lwpr(const Matrix& Xs, const Matrix& Y,
                                             const ModelSpec& spec) {
    const auto& hp = spec.hp.lwpr;
    const Eigen::Index n = Xs.rows(), d = Xs.cols();
    if ((Xs.rowwise() - Xs.row(0)).cwiseAbs().maxCoeff() == 0.0)
        throw DegenerateData("all training inputs identical, cannot place receptive fields");

    auto m = std::make_shared<LwprModel>();
    m->radius = hp.field_radius;

    // single pass: allocate a field wherever no existing one activates enough
    std::vector<Eigen::Index> center_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
        double wmax = 0.0;
        for (Eigen::Index c : center_rows) {
            const double d2 = (Xs.row(i) - Xs.row(c)).squaredNorm() * hp.field_radius;
            wmax = std::max(wmax, std::exp(-0.5 * d2));
        }
        if (center_rows.empty() || wmax < hp.gen_threshold) center_rows.push_back(i);
    }
    m->centers.resize(static_cast<Eigen::Index>(center_rows.size()), d);
    for (std::size_t k = 0; k < center_rows.size(); ++k)
        m->centers.row(static_cast<Eigen::Index>(k)) = Xs.row(center_rows[k]);

    // per-field weighted least squares on centered inputs with a bias column
    Matrix A(n, d + 1);
    for (std::size_t k = 0; k < center_rows.size(); ++k) {
        const Vector c = m->centers.row(static_cast<Eigen::Index>(k)).transpose();
        A.leftCols(d) = Xs.rowwise() - c.transpose();
        A.col(d).setOnes();
        Vector w(n);
        for (Eigen::Index i = 0; i < n; ++i)
            w(i) = std::exp(-0.5 * hp.field_radius * (Xs.row(i).transpose() - c).squaredNorm());
        Matrix Aw = A.array().colwise() * w.array();
        Matrix lhs = Aw.transpose() * A;
        lhs.diagonal().array() += hp.ridge;
        m->thetas.push_back(lhs.ldlt().solve(Aw.transpose() * Y));
    }
    return m;
}

}  // namespace exodyn
