#pragma once

#include <cmath>
#include <utility>

#include "exodyn/types.hpp"

namespace exodyn {

// Coefficient of determination in percent. Negative when predictions do
// worse than the target mean; never clamped.
inline double r_squared(const Vector& y, const Vector& yhat) {
    if (y.size() != yhat.size())
        throw DimensionMismatch("r_squared arguments differ in length");
    if (y.size() < 2) throw TooFewSamples("r_squared needs at least 2 values");
    const double mean = y.mean();
    const double ss_tot = (y.array() - mean).square().sum();
    if (ss_tot == 0.0)
        throw DegenerateTarget("r_squared target has zero variance");
    const double ss_res = (y - yhat).squaredNorm();
    return 100.0 * (1.0 - ss_res / ss_tot);
}

inline std::pair<double, double> error_metrics(const Vector& y, const Vector& yhat) {
    if (y.size() != yhat.size())
        throw DimensionMismatch("error_metrics arguments differ in length");
    if (y.size() == 0) throw EmptyInput("error_metrics got empty vectors");
    const Vector err = y - yhat;
    const double rmse = std::sqrt(err.squaredNorm() / static_cast<double>(err.size()));
    const double mae = err.cwiseAbs().mean();
    return {rmse, mae};
}

// Per-channel metrics plus their unweighted means (the "Total" columns).
struct MetricSet {
    double r2 = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
    Vector r2_channels;
    Vector rmse_channels;
    Vector mae_channels;
};

inline MetricSet compute_metrics(const Matrix& Y, const Matrix& Yhat) {
    if (Y.rows() != Yhat.rows() || Y.cols() != Yhat.cols())
        throw DimensionMismatch("metric matrices differ in shape");
    if (Y.cols() == 0) throw EmptyInput("compute_metrics got zero channels");
    MetricSet m;
    m.r2_channels.resize(Y.cols());
    m.rmse_channels.resize(Y.cols());
    m.mae_channels.resize(Y.cols());
    for (Eigen::Index c = 0; c < Y.cols(); ++c) {
        m.r2_channels(c) = r_squared(Y.col(c), Yhat.col(c));
        auto [rmse, mae] = error_metrics(Y.col(c), Yhat.col(c));
        m.rmse_channels(c) = rmse;
        m.mae_channels(c) = mae;
    }
    m.r2 = m.r2_channels.mean();
    m.rmse = m.rmse_channels.mean();
    m.mae = m.mae_channels.mean();
    return m;
}

}  // namespace exodyn
