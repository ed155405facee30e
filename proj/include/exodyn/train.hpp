#pragma once

#include <chrono>

#include "exodyn/model.hpp"
#include "exodyn/regressors/gpr.hpp"
#include "exodyn/regressors/knn.hpp"
#include "exodyn/regressors/lwpr.hpp"
#include "exodyn/regressors/mlp.hpp"
#include "exodyn/regressors/svr.hpp"
#include "exodyn/regressors/xgboost.hpp"

namespace exodyn {

// Fits the scaler, standardizes, then times the family fit alone.
inline TrainedModel train_model(const TaskDataset& ds, const ModelSpec& spec) {
    spec.validate();
    if (ds.inputs.rows() == 0) throw EmptyInput("training dataset has no rows");
    if (ds.inputs.rows() != ds.targets.rows())
        throw DimensionMismatch("inputs/targets row count differs");
    if (!ds.inputs.allFinite() || !ds.targets.allFinite())
        throw NonFiniteValue("training dataset contains non-finite entries");

    TrainedModel tm;
    tm.spec = spec;
    tm.scaler = fit_scaler(ds.inputs);
    const Matrix Xs = apply_scaler(tm.scaler, ds.inputs);

    const auto t0 = std::chrono::steady_clock::now();
    switch (spec.family) {
        case Family::LWPR: tm.model = fit_lwpr(Xs, ds.targets, spec); break;
        case Family::KNN: tm.model = fit_knn(Xs, ds.targets, spec); break;
        case Family::SVR: tm.model = fit_svr(Xs, ds.targets, spec); break;
        case Family::XGBOOST: tm.model = fit_xgboost(Xs, ds.targets, spec); break;
        case Family::MLP: {
            MlpFitReport report;
            tm.model = fit_mlp(Xs, ds.targets, spec, &report);
            tm.converged = report.converged;
            tm.convergence_note = report.note;
            break;
        }
        case Family::GPR: tm.model = fit_gpr(Xs, ds.targets, spec); break;
    }
    tm.fit_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return tm;
}

inline TrainedModel train_lwpr(const TaskDataset& ds, ModelSpec spec) {
    spec.family = Family::LWPR;
    return train_model(ds, spec);
}
inline TrainedModel train_knn(const TaskDataset& ds, ModelSpec spec) {
    spec.family = Family::KNN;
    return train_model(ds, spec);
}
inline TrainedModel train_svr(const TaskDataset& ds, ModelSpec spec) {
    spec.family = Family::SVR;
    return train_model(ds, spec);
}
inline TrainedModel train_xgboost(const TaskDataset& ds, ModelSpec spec) {
    spec.family = Family::XGBOOST;
    return train_model(ds, spec);
}
inline TrainedModel train_mlp(const TaskDataset& ds, ModelSpec spec) {
    spec.family = Family::MLP;
    return train_model(ds, spec);
}
inline TrainedModel train_gpr(const TaskDataset& ds, ModelSpec spec) {
    spec.family = Family::GPR;
    return train_model(ds, spec);
}

}  // namespace exodyn
