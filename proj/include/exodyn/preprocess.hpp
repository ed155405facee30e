#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "exodyn/rng.hpp"
#include "exodyn/types.hpp"

namespace exodyn {

// Per-column standardization fitted on a training set. Targets are never
// scaled, only inputs.
struct Scaler {
    Vector mean;
    Vector scale;
};

struct FoldPlan {
    int fold_count = 0;
    std::vector<int> assignments;
    std::uint64_t seed = 0;
};

inline constexpr double kScaleFloor = 1e-12;

// Linear interpolation of a series onto a uniform grid over [0, 1].
// Endpoints are preserved exactly.
inline Vector resample_linear(const Vector& series, int target_len) {
    if (series.size() < 2) throw TooShort("resample_linear needs at least 2 samples");
    if (target_len < 2) throw TooShort("resample_linear target length must be >= 2");
    const Eigen::Index n = series.size();
    Vector out(target_len);
    out(0) = series(0);
    out(target_len - 1) = series(n - 1);
    for (int j = 1; j + 1 < target_len; ++j) {
        double u = static_cast<double>(j) / (target_len - 1) * (n - 1);
        Eigen::Index i0 = static_cast<Eigen::Index>(std::floor(u));
        if (i0 >= n - 1) i0 = n - 2;
        double w = u - static_cast<double>(i0);
        out(j) = (1.0 - w) * series(i0) + w * series(i0 + 1);
    }
    return out;
}

namespace detail {

inline Matrix resample_columns(const Matrix& m, int target_len) {
    Matrix out(target_len, m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        out.col(c) = resample_linear(m.col(c), target_len);
    return out;
}

}  // namespace detail

// Resample every channel of every trial to common_len, then average
// pointwise. The result is a synthetic trial (trial_index 0).
inline Trial average_trials(std::span<const Trial> trials, int common_len) {
    if (trials.empty()) throw EmptyInput("average_trials got no trials");
    const Trial& first = trials.front();
    for (const Trial& t : trials) {
        if (t.task != first.task)
            throw MixedTasks("trials span tasks " + std::string(to_string(first.task)) +
                             " and " + to_string(t.task));
        if (t.subject != first.subject)
            throw MixedTasks("trials span subjects '" + first.subject + "' and '" +
                             t.subject + "'");
    }
    Trial out;
    out.task = first.task;
    out.subject = first.subject;
    out.trial_index = 0;
    out.states = Matrix::Zero(common_len, first.states.cols());
    out.robot_actions = Matrix::Zero(common_len, first.robot_actions.cols());
    out.user_actions = Matrix::Zero(common_len, first.user_actions.cols());
    double mean_duration = 0.0;
    const double inv = 1.0 / static_cast<double>(trials.size());
    for (const Trial& t : trials) {
        if (t.states.cols() != first.states.cols() ||
            t.robot_actions.cols() != first.robot_actions.cols() ||
            t.user_actions.cols() != first.user_actions.cols())
            throw DimensionMismatch("trials have differing channel counts");
        out.states += inv * detail::resample_columns(t.states, common_len);
        out.robot_actions += inv * detail::resample_columns(t.robot_actions, common_len);
        out.user_actions += inv * detail::resample_columns(t.user_actions, common_len);
        if (t.sample_rate > 0.0)
            mean_duration += inv * (static_cast<double>(t.rows()) / t.sample_rate);
    }
    out.sample_rate = mean_duration > 0.0 ? static_cast<double>(common_len) / mean_duration : 0.0;
    return out;
}

inline Trial average_trials(const std::vector<Trial>& trials, int common_len) {
    return average_trials(std::span<const Trial>(trials), common_len);
}

/// Supervised pairs: row t holds input [x_t, u_t, v_t] and target x_{t+1} - x_t.
inline TaskDataset build_pairs(const Trial& trial) {
    const Eigen::Index T = trial.rows();
    if (T < 11) throw TooFewSamples("build_pairs needs at least 11 samples, got " +
                                    std::to_string(T));
    TaskDataset ds;
    ds.task = trial.task;
    ds.subject = trial.subject;
    Matrix full = trial.input_matrix();
    ds.inputs = full.topRows(T - 1);
    ds.targets = trial.states.bottomRows(T - 1) - trial.states.topRows(T - 1);
    return ds;
}

inline Scaler fit_scaler(const Matrix& train_inputs) {
    if (train_inputs.rows() < 2) throw TooFewSamples("fit_scaler needs at least 2 rows");
    Scaler s;
    const double n = static_cast<double>(train_inputs.rows());
    s.mean = train_inputs.colwise().mean();
    Matrix centered = train_inputs.rowwise() - s.mean.transpose();
    s.scale = (centered.array().square().colwise().sum() / n).sqrt().matrix().transpose();
    s.scale = s.scale.cwiseMax(kScaleFloor);
    return s;
}

inline Matrix apply_scaler(const Scaler& s, const Matrix& inputs) {
    if (inputs.cols() != s.mean.size())
        throw DimensionMismatch("scaler fitted on " + std::to_string(s.mean.size()) +
                                " columns, got " + std::to_string(inputs.cols()));
    return (inputs.rowwise() - s.mean.transpose()).array().rowwise() /
           s.scale.transpose().array();
}

inline Vector apply_scaler(const Scaler& s, const Vector& input) {
    if (input.size() != s.mean.size())
        throw DimensionMismatch("scaler fitted on " + std::to_string(s.mean.size()) +
                                " columns, got " + std::to_string(input.size()));
    return (input - s.mean).cwiseQuotient(s.scale);
}

// Seeded shuffle, then deal rows round-robin so fold sizes differ by at most 1.
inline FoldPlan make_folds(int row_count, int k, std::uint64_t seed) {
    if (k < 2 || row_count < k)
        throw TooFewRows("make_folds needs row_count >= k >= 2, got row_count=" +
                         std::to_string(row_count) + " k=" + std::to_string(k));
    std::vector<int> order(row_count);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(seed);
    deterministic_shuffle(order, rng);
    FoldPlan plan;
    plan.fold_count = k;
    plan.seed = seed;
    plan.assignments.assign(row_count, -1);
    for (int pos = 0; pos < row_count; ++pos)
        plan.assignments[order[pos]] = pos % k;
    return plan;
}

inline std::vector<int> fold_rows(const FoldPlan& plan, int fold, bool in_fold) {
    std::vector<int> rows;
    for (int r = 0; r < static_cast<int>(plan.assignments.size()); ++r)
        if ((plan.assignments[r] == fold) == in_fold) rows.push_back(r);
    return rows;
}

inline Matrix take_rows(const Matrix& m, const std::vector<int>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    return out;
}

}  // namespace exodyn
