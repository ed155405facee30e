#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "exodyn/errors.hpp"

namespace exodyn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Reaching tasks, in the canonical order used for matrix indexing everywhere:
// horizontal, vertical, left-right diagonal, right-left diagonal,
// elbow-dominant flexion-hold, prehension (fast grasp-return).
enum class TaskLabel : int { H = 0, V, LR, RL, E, P };

inline constexpr std::array<TaskLabel, 6> kAllTasks = {
    TaskLabel::H, TaskLabel::V, TaskLabel::LR,
    TaskLabel::RL, TaskLabel::E, TaskLabel::P};

inline const char* to_string(TaskLabel t) {
    switch (t) {
        case TaskLabel::H: return "H";
        case TaskLabel::V: return "V";
        case TaskLabel::LR: return "LR";
        case TaskLabel::RL: return "RL";
        case TaskLabel::E: return "E";
        case TaskLabel::P: return "P";
    }
    throw SchemaError("unknown TaskLabel value");
}

inline TaskLabel parse_task(const std::string& s) {
    for (TaskLabel t : kAllTasks)
        if (s == to_string(t)) return t;
    throw SchemaError("unknown task label '" + s + "'");
}

inline int task_index(TaskLabel t) { return static_cast<int>(t); }

enum class Family : int { LWPR = 0, KNN, SVR, XGBOOST, MLP, GPR };

inline constexpr std::array<Family, 6> kAllFamilies = {
    Family::LWPR, Family::KNN, Family::SVR,
    Family::XGBOOST, Family::MLP, Family::GPR};

inline const char* to_string(Family f) {
    switch (f) {
        case Family::LWPR: return "LWPR";
        case Family::KNN: return "KNN";
        case Family::SVR: return "SVR";
        case Family::XGBOOST: return "XGBOOST";
        case Family::MLP: return "MLP";
        case Family::GPR: return "GPR";
    }
    throw SchemaError("unknown Family value");
}

inline Family parse_family(const std::string& s) {
    for (Family f : kAllFamilies)
        if (s == to_string(f)) return f;
    throw SchemaError("unknown family '" + s + "'");
}

inline int family_index(Family f) { return static_cast<int>(f); }

// State is [elbow angle, elbow velocity, wrist angle, wrist velocity] by
// default; robot action is the two actuation thresholds; user action is the
// four sEMG channels. Dimensions are configurable, the 4/2/4 split is only
// the default instrumentation.
struct DimensionProfile {
    int state_dim = 4;
    int robot_action_dim = 2;
    int user_action_dim = 4;

    int input_dim() const { return state_dim + robot_action_dim + user_action_dim; }

    void validate() const {
        if (state_dim < 1 || robot_action_dim < 0 || user_action_dim < 0)
            throw DimensionMismatch("dimension profile entries must be positive");
    }
};

// One recorded repetition of a task: per-sample states and both action
// streams, all row-aligned.
struct Trial {
    Matrix states;         // T x L
    Matrix robot_actions;  // T x M
    Matrix user_actions;   // T x N
    double sample_rate = 0.0;
    TaskLabel task = TaskLabel::H;
    std::string subject;
    int trial_index = 0;  // 0 marks an averaged trial

    Eigen::Index rows() const { return states.rows(); }

    Matrix input_matrix() const {
        Matrix m(states.rows(), states.cols() + robot_actions.cols() + user_actions.cols());
        m << states, robot_actions, user_actions;
        return m;
    }
};

// Supervised pairs for one task: inputs are [x_t, u_t, v_t], targets are the
// state deltas x_{t+1} - x_t.
struct TaskDataset {
    Matrix inputs;
    Matrix targets;
    TaskLabel task = TaskLabel::H;
    std::string subject;

    Eigen::Index rows() const { return inputs.rows(); }
};

inline constexpr int kMinDatasetRows = 10;

inline const TaskDataset& validate_dataset(const TaskDataset& ds,
                                           const DimensionProfile& profile) {
    profile.validate();
    if (ds.inputs.rows() == 0) throw EmptyInput("dataset has no rows");
    if (ds.inputs.rows() != ds.targets.rows())
        throw DimensionMismatch("inputs/targets row count differs");
    if (ds.inputs.cols() != profile.input_dim())
        throw DimensionMismatch("expected " + std::to_string(profile.input_dim()) +
                                " input columns, got " + std::to_string(ds.inputs.cols()));
    if (ds.targets.cols() != profile.state_dim)
        throw DimensionMismatch("expected " + std::to_string(profile.state_dim) +
                                " target columns, got " + std::to_string(ds.targets.cols()));
    if (ds.inputs.rows() < kMinDatasetRows)
        throw TooFewSamples("dataset has " + std::to_string(ds.inputs.rows()) +
                            " rows, need at least " + std::to_string(kMinDatasetRows));
    if (!ds.inputs.allFinite() || !ds.targets.allFinite())
        throw NonFiniteValue("dataset contains non-finite entries");
    return ds;
}

// Additive process noise on the next state, x_{t+1} = x_t + f(...) + eta.
struct NoiseSpec {
    Matrix covariance;

    static NoiseSpec zero(int state_dim) {
        return {Matrix::Zero(state_dim, state_dim)};
    }

    static NoiseSpec diagonal(const Vector& variances) {
        NoiseSpec n;
        n.covariance = variances.asDiagonal();
        return n;
    }

    void validate() const {
        if (covariance.rows() != covariance.cols())
            throw DimensionMismatch("noise covariance must be square");
        if (!covariance.allFinite())
            throw NonFiniteValue("noise covariance contains non-finite entries");
        if (!covariance.isApprox(covariance.transpose(), 1e-10) &&
            (covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw DimensionMismatch("noise covariance must be symmetric");
        Eigen::SelfAdjointEigenSolver<Matrix> es(covariance);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw NotPositiveDefinite("noise covariance has negative eigenvalues");
    }

    // matrix square root via eigendecomposition; tolerates zero eigenvalues
    Matrix sqrt() const {
        validate();
        Eigen::SelfAdjointEigenSolver<Matrix> es(covariance);
        Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    }
};

}  // namespace exodyn
