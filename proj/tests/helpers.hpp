#pragma once

#include <filesystem>
#include <string>

#include "exodyn/exodyn.hpp"

namespace testutil {

using exodyn::Matrix;
using exodyn::SplitMix64;
using exodyn::Vector;

inline Matrix random_matrix(SplitMix64& rng, int rows, int cols, double lo = -1.0,
                            double hi = 1.0) {
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(lo, hi);
    return m;
}

inline Vector random_vector(SplitMix64& rng, int n, double lo = -1.0, double hi = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

// Smooth nonlinear multi-output dataset in the default 10-in/4-out profile.
inline exodyn::TaskDataset smooth_dataset(std::uint64_t seed, int rows,
                                          double noise = 0.0) {
    SplitMix64 rng(seed);
    exodyn::TaskDataset ds;
    ds.task = exodyn::TaskLabel::H;
    ds.subject = "S1";
    ds.inputs.resize(rows, 10);
    ds.targets.resize(rows, 4);
    for (int r = 0; r < rows; ++r) {
        const double t = static_cast<double>(r) / rows * 6.0;
        for (int c = 0; c < 10; ++c)
            ds.inputs(r, c) = std::sin(0.7 * t + 0.5 * c) + 0.05 * rng.uniform(-1.0, 1.0);
        const auto x = ds.inputs.row(r);
        ds.targets(r, 0) = 0.6 * std::tanh(x(0) + 0.3 * x(4)) + noise * rng.normal();
        ds.targets(r, 1) = 0.4 * x(1) * x(2) + noise * rng.normal();
        ds.targets(r, 2) = 0.5 * std::sin(x(3) + x(7)) + noise * rng.normal();
        ds.targets(r, 3) = 0.3 * x(8) - 0.2 * x(9) + noise * rng.normal();
    }
    return ds;
}

// 1-D-input dataset wrapped into the TaskDataset shape (1 input col, 1 target).
inline exodyn::TaskDataset line_dataset(int rows, double slope, double intercept = 0.0) {
    exodyn::TaskDataset ds;
    ds.inputs.resize(rows, 1);
    ds.targets.resize(rows, 1);
    for (int r = 0; r < rows; ++r) {
        const double x = -1.0 + 2.0 * static_cast<double>(r) / (rows - 1);
        ds.inputs(r, 0) = x;
        ds.targets(r, 0) = slope * x + intercept;
    }
    return ds;
}

inline std::filesystem::path fresh_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("exodyn_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline std::string repo_path(const std::string& rel) {
    return (std::filesystem::path(EXODYN_SOURCE_DIR) / rel).string();
}

}  // namespace testutil
