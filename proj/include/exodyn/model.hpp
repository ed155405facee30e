#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "exodyn/kernels.hpp"
#include "exodyn/preprocess.hpp"
#include "exodyn/types.hpp"

namespace exodyn {

using json = nlohmann::json;

inline json vector_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

inline Vector json_vector(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

inline json matrix_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline Matrix json_matrix(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw SchemaError("matrix payload size mismatch");
    Matrix m(rows, cols);
    std::size_t at = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[at++].get<double>();
    return m;
}

struct LwprParams {
    double field_radius = 1.0;        // r in D = r*I
    double gen_threshold = 0.1;       // allocate a field when max activation drops below
    double ridge = 1e-10;             // stabilizes the local normal equations
};

struct KnnParams {
    int k = 0;                        // 0 selects k by inner cross-validation
    double weight_power = 2.0;        // p in ((1+d)^-1)^p
    int cv_folds = 5;
    int k_cap = 99;
};

struct SvrParams {
    double cost = 10.0;
    double epsilon = 0.01;
    double tol = 1e-6;
    long max_iter = 100000;
    CompositeKernelParams kernel;
};

struct XgbParams {
    int rounds = 100;
    double learning_rate = 0.3;
    int max_depth = 3;
    double reg_lambda = 1.0;
    double gamma = 0.0;
};

struct MlpParams {
    int hidden_width = 64;
    int max_iter = 200;
    double grad_tol = 1e-6;
    int history = 10;
};

struct GprParams {
    CompositeKernelParams kernel;
    int max_rows = 2000;
    double jitter_start = 1e-10;
    double jitter_max = 1e-4;
};

struct Hyperparams {
    LwprParams lwpr;
    KnnParams knn;
    SvrParams svr;
    XgbParams xgb;
    MlpParams mlp;
    GprParams gpr;
};

struct ModelSpec {
    Family family = Family::KNN;
    Hyperparams hp;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(hp.lwpr.field_radius > 0.0))
            throw DimensionMismatch("LWPR field radius must be > 0");
        if (!(hp.lwpr.gen_threshold > 0.0 && hp.lwpr.gen_threshold <= 1.0))
            throw DimensionMismatch("LWPR generation threshold must be in (0, 1]");
        if (hp.knn.k < 0) throw DimensionMismatch("KNN k must be >= 1 (or 0 for auto)");
        if (!(hp.knn.weight_power >= 0.0))
            throw DimensionMismatch("KNN weight power must be >= 0");
        if (!(hp.svr.cost > 0.0)) throw DimensionMismatch("SVR cost must be > 0");
        if (!(hp.svr.epsilon > 0.0)) throw DimensionMismatch("SVR epsilon must be > 0");
        hp.svr.kernel.validate();
        if (hp.xgb.rounds < 1) throw DimensionMismatch("XGBoost needs >= 1 round");
        if (!(hp.xgb.learning_rate > 0.0))
            throw DimensionMismatch("XGBoost learning rate must be > 0");
        if (hp.xgb.reg_lambda < 0.0) throw DimensionMismatch("XGBoost lambda must be >= 0");
        if (hp.xgb.gamma < 0.0) throw DimensionMismatch("XGBoost gamma must be >= 0");
        if (hp.xgb.max_depth < 1) throw DimensionMismatch("XGBoost max depth must be >= 1");
        if (hp.mlp.hidden_width < 1) throw DimensionMismatch("MLP width must be >= 1");
        if (hp.mlp.max_iter < 1) throw DimensionMismatch("MLP max iterations must be >= 1");
        hp.gpr.kernel.validate();
        if (hp.gpr.max_rows < 1) throw DimensionMismatch("GPR row cap must be >= 1");
    }
};

// One fitted family, internally one independent scalar sub-model per output
// channel. Inputs arrive already standardized by the owning TrainedModel.
class FamilyModel {
  public:
    virtual ~FamilyModel() = default;
    virtual Family family() const = 0;
    virtual int output_dim() const = 0;
    virtual Vector predict_std(const Vector& xs) const = 0;

    virtual Matrix predict_std_batch(const Matrix& Xs) const {
        Matrix out(Xs.rows(), output_dim());
        for (Eigen::Index i = 0; i < Xs.rows(); ++i)
            out.row(i) = predict_std(Xs.row(i).transpose()).transpose();
        return out;
    }

    virtual Vector predict_variance_std(const Vector&) const {
        throw UnsupportedOperation(std::string(to_string(family())) +
                                   " does not provide predictive variance");
    }

    virtual json payload_json() const = 0;
};

struct TrainedModel {
    ModelSpec spec;
    Scaler scaler;
    std::shared_ptr<const FamilyModel> model;
    double fit_time = 0.0;
    bool converged = true;
    std::string convergence_note;

    Vector predict(const Vector& query) const {
        if (query.size() != scaler.mean.size())
            throw DimensionMismatch("query has " + std::to_string(query.size()) +
                                    " dims, model expects " +
                                    std::to_string(scaler.mean.size()));
        return model->predict_std(apply_scaler(scaler, query));
    }

    Matrix predict_batch(const Matrix& queries) const {
        if (queries.cols() != scaler.mean.size())
            throw DimensionMismatch("query matrix has " + std::to_string(queries.cols()) +
                                    " cols, model expects " +
                                    std::to_string(scaler.mean.size()));
        return model->predict_std_batch(apply_scaler(scaler, queries));
    }

    Vector predict_variance(const Vector& query) const {
        if (query.size() != scaler.mean.size())
            throw DimensionMismatch("query dimension mismatch");
        return model->predict_variance_std(apply_scaler(scaler, query));
    }
};

}  // namespace exodyn
