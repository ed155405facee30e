#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "exodyn/metrics.hpp"
#include "exodyn/train.hpp"

namespace exodyn {

struct CvResult {
    MetricSet metrics;
    double mean_fit_time = 0.0;
    std::vector<double> fold_fit_times;
};

struct FitTiming {
    Family family = Family::KNN;
    double seconds = 0.0;
};

namespace detail {

inline MetricSet average_metric_sets(const std::vector<MetricSet>& sets) {
    MetricSet out;
    if (sets.empty()) throw EmptyInput("no metric sets to average");
    const auto n = static_cast<double>(sets.size());
    out.r2_channels = Vector::Zero(sets.front().r2_channels.size());
    out.rmse_channels = Vector::Zero(sets.front().rmse_channels.size());
    out.mae_channels = Vector::Zero(sets.front().mae_channels.size());
    for (const MetricSet& s : sets) {
        out.r2 += s.r2 / n;
        out.rmse += s.rmse / n;
        out.mae += s.mae / n;
        out.r2_channels += s.r2_channels / n;
        out.rmse_channels += s.rmse_channels / n;
        out.mae_channels += s.mae_channels / n;
    }
    return out;
}

}  // namespace detail

// Per-fold train/evaluate, metrics averaged over folds. Each fold trains
// with a seed derived from the spec seed and the fold index.
inline CvResult cross_validate(const ModelSpec& spec, const TaskDataset& ds,
                               const FoldPlan& folds,
                               std::vector<FitTiming>* timings = nullptr) {
    if (static_cast<Eigen::Index>(folds.assignments.size()) != ds.rows())
        throw DimensionMismatch("fold plan does not cover the dataset rows");
    std::vector<MetricSet> per_fold;
    CvResult res;
    for (int f = 0; f < folds.fold_count; ++f) {
        const auto tr = fold_rows(folds, f, false);
        const auto te = fold_rows(folds, f, true);
        if (tr.empty() || te.empty())
            throw TooFewRows("fold " + std::to_string(f) + " leaves an empty split");
        TaskDataset sub{take_rows(ds.inputs, tr), take_rows(ds.targets, tr), ds.task,
                        ds.subject};
        ModelSpec fold_spec = spec;
        fold_spec.seed = derive_seed({spec.seed, static_cast<std::uint64_t>(f)});
        TrainedModel tm;
        try {
            tm = train_model(sub, fold_spec);
        } catch (const Error& e) {
            throw NonConvergence("fold " + std::to_string(f) + ": " + e.what());
        }
        res.fold_fit_times.push_back(tm.fit_time);
        if (timings) timings->push_back({spec.family, tm.fit_time});
        const Matrix pred = tm.predict_batch(take_rows(ds.inputs, te));
        per_fold.push_back(compute_metrics(take_rows(ds.targets, te), pred));
    }
    res.metrics = detail::average_metric_sets(per_fold);
    for (double t : res.fold_fit_times) res.mean_fit_time += t;
    res.mean_fit_time /= static_cast<double>(res.fold_fit_times.size());
    return res;
}

struct CrossTaskMatrix {
    Family family = Family::KNN;
    std::string subject;
    std::vector<TaskLabel> labels;              // axis order, row = trained-on
    std::vector<std::vector<MetricSet>> cells;  // [row][col]

    const MetricSet& cell(std::size_t row, std::size_t col) const {
        return cells[row][col];
    }
};

// Seed for the model behind cell (row, col). Off-diagonal cells of a row
// share one full-train model, derived with col = axis size as sentinel.
inline std::uint64_t cell_seed(std::uint64_t base, Family family, int row, int col) {
    return derive_seed({base, static_cast<std::uint64_t>(family),
                        static_cast<std::uint64_t>(row), static_cast<std::uint64_t>(col)});
}

// General grid over an explicit task axis; diagonal by k-fold CV, off-diagonal
// by one full-train model per row evaluated on every other task.
inline CrossTaskMatrix cross_task_grid(const ModelSpec& spec,
                                       std::span<const TaskDataset> datasets,
                                       std::span<const FoldPlan> folds,
                                       std::vector<FitTiming>* timings = nullptr) {
    if (datasets.empty()) throw EmptyInput("cross_task_grid got no datasets");
    if (folds.size() != datasets.size())
        throw DimensionMismatch("one fold plan per dataset required");
    const int n = static_cast<int>(datasets.size());
    CrossTaskMatrix out;
    out.family = spec.family;
    out.subject = datasets.front().subject;
    for (const TaskDataset& ds : datasets) out.labels.push_back(ds.task);
    out.cells.assign(static_cast<std::size_t>(n),
                     std::vector<MetricSet>(static_cast<std::size_t>(n)));

    for (int i = 0; i < n; ++i) {
        ModelSpec diag_spec = spec;
        diag_spec.seed = cell_seed(spec.seed, spec.family, i, i);
        out.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] =
            cross_validate(diag_spec, datasets[static_cast<std::size_t>(i)],
                           folds[static_cast<std::size_t>(i)], timings)
                .metrics;

        ModelSpec row_spec = spec;
        row_spec.seed = cell_seed(spec.seed, spec.family, i, n);
        TrainedModel full;
        try {
            full = train_model(datasets[static_cast<std::size_t>(i)], row_spec);
        } catch (const Error& e) {
            throw NonConvergence("row task " +
                                 std::string(to_string(datasets[static_cast<std::size_t>(i)].task)) +
                                 ": " + e.what());
        }
        if (timings) timings->push_back({spec.family, full.fit_time});
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const TaskDataset& target = datasets[static_cast<std::size_t>(j)];
            const Matrix pred = full.predict_batch(target.inputs);
            out.cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                compute_metrics(target.targets, pred);
        }
    }
    return out;
}

// The canonical six-task matrix: requires exactly one dataset per TaskLabel,
// in canonical order.
inline CrossTaskMatrix cross_task_matrix(const ModelSpec& spec,
                                         std::span<const TaskDataset> datasets,
                                         std::span<const FoldPlan> folds,
                                         std::vector<FitTiming>* timings = nullptr) {
    if (datasets.size() != kAllTasks.size())
        throw MissingTask("expected one dataset per task, got " +
                          std::to_string(datasets.size()));
    for (std::size_t i = 0; i < kAllTasks.size(); ++i)
        if (datasets[i].task != kAllTasks[i])
            throw MissingTask("dataset " + std::to_string(i) + " is task " +
                              to_string(datasets[i].task) + ", expected " +
                              to_string(kAllTasks[i]));
    return cross_task_grid(spec, datasets, folds, timings);
}

// Total-R2 view of a matrix, the unit the graph layer consumes.
struct TotalGrid {
    std::string subject;
    std::vector<TaskLabel> labels;
    Matrix r2;  // labels.size() square

    static TotalGrid from_matrix(const CrossTaskMatrix& m) {
        TotalGrid g;
        g.subject = m.subject;
        g.labels = m.labels;
        const auto n = static_cast<Eigen::Index>(m.labels.size());
        g.r2.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                g.r2(i, j) = m.cell(static_cast<std::size_t>(i),
                                    static_cast<std::size_t>(j)).r2;
        return g;
    }
};

struct GeneralizabilityGraph {
    Family family = Family::KNN;
    std::vector<TaskLabel> labels;
    Matrix edges;              // subject-averaged total R2, row = trained-on
    double score = 0.0;        // mean of all directed edges, self-loops included
    double score_off_diagonal = 0.0;  // documented variant without self-loops
};

inline GeneralizabilityGraph build_graph(Family family, std::span<const TotalGrid> grids) {
    if (grids.empty()) throw EmptyInput("build_graph got no subject grids");
    GeneralizabilityGraph g;
    g.family = family;
    g.labels = grids.front().labels;
    const auto n = static_cast<Eigen::Index>(g.labels.size());
    g.edges = Matrix::Zero(n, n);
    for (const TotalGrid& grid : grids) {
        if (grid.labels != g.labels)
            throw DimensionMismatch("subject grids disagree on the task axis");
        g.edges += grid.r2;
    }
    g.edges /= static_cast<double>(grids.size());
    g.score = g.edges.mean();
    if (n > 1) {
        const double total = g.edges.sum() - g.edges.diagonal().sum();
        g.score_off_diagonal = total / static_cast<double>(n * n - n);
    } else {
        g.score_off_diagonal = g.score;
    }
    return g;
}

inline double graph_score(Family family, std::span<const TotalGrid> grids) {
    return build_graph(family, grids).score;
}

struct TaskStats {
    TaskLabel task = TaskLabel::H;
    int count = 0;      // outgoing edges at or above threshold
    double mean = 0.0;  // mean of those edges; 0 when count is 0
};

inline std::vector<TaskStats> task_generalizability(std::span<const TotalGrid> grids,
                                                    double threshold = 80.0) {
    if (grids.empty()) throw EmptyInput("task_generalizability got no grids");
    GeneralizabilityGraph g = build_graph(Family::KNN, grids);  // family irrelevant here
    std::vector<TaskStats> out;
    const auto n = static_cast<Eigen::Index>(g.labels.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        TaskStats st;
        st.task = g.labels[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            if (g.edges(i, j) >= threshold) {
                ++st.count;
                acc += g.edges(i, j);
            }
        }
        st.mean = st.count > 0 ? acc / st.count : 0.0;
        out.push_back(st);
    }
    return out;
}

struct TaskRanking {
    std::vector<TaskLabel> order;
    std::map<TaskLabel, double> mean_scores;
};

// Per-task mean over families, descending; ties keep canonical task order.
// The strict variant demands all six families.
inline TaskRanking task_ranking_over(
    const std::map<Family, std::map<TaskLabel, double>>& scores) {
    if (scores.empty()) throw MissingEntries("no family task scores given");
    TaskRanking out;
    std::vector<TaskLabel> tasks;
    for (const auto& [task, value] : scores.begin()->second) tasks.push_back(task);
    for (const auto& [family, per_task] : scores) {
        if (per_task.size() != tasks.size())
            throw MissingEntries("family " + std::string(to_string(family)) +
                                 " misses task scores");
        for (TaskLabel t : tasks)
            if (!per_task.count(t))
                throw MissingEntries("family " + std::string(to_string(family)) +
                                     " misses task " + to_string(t));
    }
    for (TaskLabel t : tasks) {
        double acc = 0.0;
        for (const auto& [family, per_task] : scores) acc += per_task.at(t);
        out.mean_scores[t] = acc / static_cast<double>(scores.size());
    }
    out.order = tasks;
    std::stable_sort(out.order.begin(), out.order.end(), [&](TaskLabel a, TaskLabel b) {
        if (out.mean_scores[a] != out.mean_scores[b])
            return out.mean_scores[a] > out.mean_scores[b];
        return static_cast<int>(a) < static_cast<int>(b);
    });
    return out;
}

inline TaskRanking task_ranking(
    const std::map<Family, std::map<TaskLabel, double>>& scores) {
    if (scores.size() != kAllFamilies.size())
        throw MissingEntries("task_ranking needs scores for all six families");
    for (const auto& [family, per_task] : scores)
        if (per_task.size() != kAllTasks.size())
            throw MissingEntries("family " + std::string(to_string(family)) +
                                 " misses task scores");
    return task_ranking_over(scores);
}

inline std::map<Family, double> timing_report(std::span<const FitTiming> records) {
    std::map<Family, double> sums;
    std::map<Family, int> counts;
    for (const FitTiming& r : records) {
        sums[r.family] += r.seconds;
        counts[r.family] += 1;
    }
    std::map<Family, double> out;
    for (const auto& [family, total] : sums) out[family] = total / counts[family];
    return out;
}

inline std::map<Family, double> timing_report(std::span<const TrainedModel> models) {
    std::vector<FitTiming> records;
    for (const TrainedModel& m : models) records.push_back({m.spec.family, m.fit_time});
    return timing_report(std::span<const FitTiming>(records));
}

}  // namespace exodyn
