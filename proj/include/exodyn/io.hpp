#pragma once

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include "exodyn/exports.hpp"
#include "exodyn/types.hpp"

namespace exodyn {

inline constexpr const char* kTrialCsvHeader =
    "t,elbow_angle,elbow_vel,wrist_angle,wrist_vel,thr_elbow,thr_hand,"
    "emg_bicep,emg_tricep,emg_open,emg_close,subject,task,trial";

// One file holds exactly one trial in the fixed column schema; the metadata
// columns are constant within a file and make it self-describing.
inline void write_trial_csv(const Trial& trial, const std::string& path) {
    if (trial.rows() < 2) throw TooShort("trial needs at least 2 samples");
    if (trial.states.cols() != 4 || trial.robot_actions.cols() != 2 ||
        trial.user_actions.cols() != 4)
        throw UnsupportedOperation("trial CSV schema covers the default 4/2/4 profile");
    if (trial.robot_actions.rows() != trial.rows() ||
        trial.user_actions.rows() != trial.rows())
        throw DimensionMismatch("trial streams are not row-aligned");
    if (trial.sample_rate <= 0.0)
        throw NonFiniteValue("trial sample rate must be positive");
    std::ofstream out = detail::open_out(path);
    out << kTrialCsvHeader << "\n";
    for (Eigen::Index r = 0; r < trial.rows(); ++r) {
        out << detail::fmt_double(static_cast<double>(r) / trial.sample_rate);
        for (Eigen::Index c = 0; c < 4; ++c)
            out << "," << detail::fmt_double(trial.states(r, c));
        for (Eigen::Index c = 0; c < 2; ++c)
            out << "," << detail::fmt_double(trial.robot_actions(r, c));
        for (Eigen::Index c = 0; c < 4; ++c)
            out << "," << detail::fmt_double(trial.user_actions(r, c));
        out << "," << trial.subject << "," << to_string(trial.task) << ","
            << trial.trial_index << "\n";
    }
    if (!out) throw IoFailure("failed writing " + path);
}

inline Trial read_trial_csv(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty trial file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrialCsvHeader)
        throw SchemaError("trial file " + path + " has a non-matching header");

    std::vector<double> times;
    std::vector<std::array<double, 10>> rows;
    Trial trial;
    bool meta_set = false;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto tok = detail::split_csv_line(line);
        const std::string where = path + ":" + std::to_string(lineno);
        if (tok.size() != 14) throw SchemaError("row width at " + where);
        times.push_back(detail::parse_double(tok[0], where));
        std::array<double, 10> vals{};
        for (int i = 0; i < 10; ++i)
            vals[static_cast<std::size_t>(i)] =
                detail::parse_double(tok[static_cast<std::size_t>(i + 1)], where);
        rows.push_back(vals);
        const std::string& subject = tok[11];
        const TaskLabel task = parse_task(tok[12]);
        const int trial_index = static_cast<int>(detail::parse_double(tok[13], where));
        if (!meta_set) {
            trial.subject = subject;
            trial.task = task;
            trial.trial_index = trial_index;
            meta_set = true;
        } else if (subject != trial.subject || task != trial.task ||
                   trial_index != trial.trial_index) {
            throw MixedTasks("trial file " + path + " mixes metadata at " + where);
        }
    }
    if (rows.size() < 2) throw TooShort("trial file " + path + " has fewer than 2 rows");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw SchemaError("trial file " + path + " time column is not increasing");
    trial.sample_rate =
        static_cast<double>(times.size() - 1) / (times.back() - times.front());

    const auto n = static_cast<Eigen::Index>(rows.size());
    trial.states.resize(n, 4);
    trial.robot_actions.resize(n, 2);
    trial.user_actions.resize(n, 4);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& vals = rows[static_cast<std::size_t>(r)];
        for (int c = 0; c < 4; ++c) trial.states(r, c) = vals[static_cast<std::size_t>(c)];
        for (int c = 0; c < 2; ++c)
            trial.robot_actions(r, c) = vals[static_cast<std::size_t>(c + 4)];
        for (int c = 0; c < 4; ++c)
            trial.user_actions(r, c) = vals[static_cast<std::size_t>(c + 6)];
    }
    return trial;
}

}  // namespace exodyn
