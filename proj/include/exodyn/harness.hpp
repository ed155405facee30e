#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "exodyn/exports.hpp"
#include "exodyn/io.hpp"
#include "exodyn/serialize.hpp"
#include "exodyn/synth.hpp"

namespace exodyn {

struct RunConfig {
    std::uint64_t seed = 20240817ull;
    std::vector<Family> families{kAllFamilies.begin(), kAllFamilies.end()};
    std::vector<TaskLabel> tasks{kAllTasks.begin(), kAllTasks.end()};
    int subjects = 3;
    int fold_count = 5;
    int trials_per_task = 4;
    int common_len = 400;
    double noise_scale = 1.0;
    double edge_threshold = 80.0;
    std::string output_dir = "out";
    DimensionProfile dims;
    Hyperparams hyperparams;

    void validate() const {
        if (families.empty()) throw SchemaError("config needs at least one family");
        if (tasks.empty()) throw SchemaError("config needs at least one task");
        if (fold_count < 2) throw SchemaError("fold_count must be >= 2");
        if (subjects < 1) throw SchemaError("subjects must be >= 1");
        if (trials_per_task < 1) throw SchemaError("trials_per_task must be >= 1");
        if (common_len < kMinDatasetRows + 2)
            throw SchemaError("common_len must be >= " + std::to_string(kMinDatasetRows + 2));
        if (noise_scale < 0.0) throw SchemaError("noise_scale must be >= 0");
        if (output_dir.empty()) throw SchemaError("output_dir must be set");
        dims.validate();
    }
};

namespace detail {

// Keeps canonical enum order regardless of how the list arrived.
template <typename T, std::size_t N>
std::vector<T> canonical_subset(std::vector<T> values, const std::array<T, N>& order) {
    std::set<T> present(values.begin(), values.end());
    std::vector<T> out;
    for (T v : order)
        if (present.count(v)) out.push_back(v);
    return out;
}

inline std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace detail

inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["families"] = nlohmann::ordered_json::array();
    for (Family f : cfg.families) j["families"].push_back(to_string(f));
    j["tasks"] = nlohmann::ordered_json::array();
    for (TaskLabel t : cfg.tasks) j["tasks"].push_back(to_string(t));
    j["subjects"] = cfg.subjects;
    j["fold_count"] = cfg.fold_count;
    j["trials_per_task"] = cfg.trials_per_task;
    j["common_len"] = cfg.common_len;
    j["noise_scale"] = cfg.noise_scale;
    j["edge_threshold"] = cfg.edge_threshold;
    j["output_dir"] = cfg.output_dir;
    j["dims"] = {{"state_dim", cfg.dims.state_dim},
                 {"robot_action_dim", cfg.dims.robot_action_dim},
                 {"user_action_dim", cfg.dims.user_action_dim}};
    j["hyperparams"] = hyperparams_json(cfg.hyperparams);
    return j;
}

// Missing keys keep their defaults; unknown keys are rejected.
inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    const std::set<std::string> known = {
        "seed",       "families",   "tasks",           "subjects",
        "fold_count", "trials_per_task", "common_len", "noise_scale",
        "edge_threshold", "output_dir", "dims",        "hyperparams"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw SchemaError("unknown config key '" + it.key() + "'");
    try {
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("families")) {
            cfg.families.clear();
            for (const auto& f : j.at("families"))
                cfg.families.push_back(parse_family(f.get<std::string>()));
        }
        if (j.contains("tasks")) {
            cfg.tasks.clear();
            for (const auto& t : j.at("tasks"))
                cfg.tasks.push_back(parse_task(t.get<std::string>()));
        }
        if (j.contains("subjects")) cfg.subjects = j.at("subjects").get<int>();
        if (j.contains("fold_count")) cfg.fold_count = j.at("fold_count").get<int>();
        if (j.contains("trials_per_task"))
            cfg.trials_per_task = j.at("trials_per_task").get<int>();
        if (j.contains("common_len")) cfg.common_len = j.at("common_len").get<int>();
        if (j.contains("noise_scale")) cfg.noise_scale = j.at("noise_scale").get<double>();
        if (j.contains("edge_threshold"))
            cfg.edge_threshold = j.at("edge_threshold").get<double>();
        if (j.contains("output_dir")) cfg.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("dims")) {
            const auto& d = j.at("dims");
            cfg.dims.state_dim = d.at("state_dim").get<int>();
            cfg.dims.robot_action_dim = d.at("robot_action_dim").get<int>();
            cfg.dims.user_action_dim = d.at("user_action_dim").get<int>();
        }
        if (j.contains("hyperparams")) {
            nlohmann::json merged = hyperparams_json(Hyperparams{});
            merged.merge_patch(j.at("hyperparams"));
            cfg.hyperparams = hyperparams_from_json(merged);
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad config value: ") + e.what());
    }
    cfg.families = detail::canonical_subset(cfg.families, kAllFamilies);
    cfg.tasks = detail::canonical_subset(cfg.tasks, kAllTasks);
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("unparseable config " + path + ": " + e.what());
    }
    return config_from_json(j);
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string trial_filename(const std::string& subject, TaskLabel task, int trial) {
    return subject + "_" + to_string(task) + "_t" + std::to_string(trial) + ".csv";
}

inline std::uint64_t task_seed(const RunConfig& cfg, int subject_index, TaskLabel task) {
    return derive_seed({cfg.seed, 0x67656eull, static_cast<std::uint64_t>(subject_index),
                        static_cast<std::uint64_t>(task_index(task))});
}

}  // namespace detail

// Writes one CSV per (subject, task, trial) plus a manifest of files and the
// seeds each task rollout used.
inline nlohmann::ordered_json cmd_generate(const RunConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    const fs::path data_dir = fs::path(cfg.output_dir) / "data";
    std::error_code ec;
    fs::create_directories(data_dir, ec);
    if (ec) throw IoFailure("cannot create " + data_dir.string());

    const auto archetypes = default_archetypes();
    NoiseSpec noise = default_noise();
    noise.covariance *= cfg.noise_scale * cfg.noise_scale;

    nlohmann::ordered_json manifest;
    manifest["seed"] = cfg.seed;
    manifest["config"] = config_json(cfg);
    manifest["files"] = nlohmann::ordered_json::array();
    manifest["task_seeds"] = nlohmann::ordered_json::object();

    for (int s = 0; s < cfg.subjects; ++s) {
        const SubjectParams subject = make_subject(s, cfg.seed);
        for (TaskLabel task : cfg.tasks) {
            const TaskArchetype& arch = archetypes[static_cast<std::size_t>(task_index(task))];
            const std::uint64_t seed = detail::task_seed(cfg, s, task);
            manifest["task_seeds"][subject.id][to_string(task)] = seed;
            const auto trials =
                generate_task_for(arch, noise, cfg.trials_per_task, seed, subject);
            for (const Trial& tr : trials) {
                const std::string name =
                    detail::trial_filename(subject.id, task, tr.trial_index);
                write_trial_csv(tr, (data_dir / name).string());
                nlohmann::ordered_json entry;
                entry["path"] = (fs::path("data") / name).generic_string();
                entry["subject"] = subject.id;
                entry["task"] = to_string(task);
                entry["trial"] = tr.trial_index;
                manifest["files"].push_back(entry);
            }
        }
    }
    {
        std::ofstream out = detail::open_out((data_dir / "manifest.json").string());
        out << manifest.dump(2) << "\n";
        if (!out) throw IoFailure("failed writing manifest");
    }
    return manifest;
}

// Structural validator for the subset of JSON Schema the shipped documents
// use: type, properties, required, additionalProperties, items, enum.
inline void validate_against_schema(const nlohmann::json& value,
                                    const nlohmann::json& schema,
                                    const std::string& where = "$") {
    if (schema.contains("type")) {
        const std::string t = schema.at("type").get<std::string>();
        const bool ok = (t == "object" && value.is_object()) ||
                        (t == "array" && value.is_array()) ||
                        (t == "string" && value.is_string()) ||
                        (t == "number" && value.is_number()) ||
                        (t == "integer" && value.is_number_integer()) ||
                        (t == "boolean" && value.is_boolean());
        if (!ok) throw SchemaError(where + " is not of type " + t);
    }
    if (schema.contains("enum")) {
        bool hit = false;
        for (const auto& option : schema.at("enum"))
            if (option == value) hit = true;
        if (!hit) throw SchemaError(where + " is outside its enum");
    }
    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema.at("required"))
                if (!value.contains(key.get<std::string>()))
                    throw SchemaError(where + " misses required key " +
                                      key.get<std::string>());
        const auto* props = schema.contains("properties") ? &schema.at("properties") : nullptr;
        for (auto it = value.begin(); it != value.end(); ++it) {
            if (props && props->contains(it.key())) {
                validate_against_schema(it.value(), props->at(it.key()),
                                        where + "." + it.key());
            } else if (schema.contains("additionalProperties")) {
                const auto& ap = schema.at("additionalProperties");
                if (ap.is_boolean() && !ap.get<bool>())
                    throw SchemaError(where + " has unexpected key " + it.key());
                if (ap.is_object())
                    validate_against_schema(it.value(), ap, where + "." + it.key());
            }
        }
    }
    if (value.is_array() && schema.contains("items")) {
        std::size_t i = 0;
        for (const auto& element : value)
            validate_against_schema(element, schema.at("items"),
                                    where + "[" + std::to_string(i++) + "]");
    }
}

inline nlohmann::ordered_json summary_schema() {
    return nlohmann::ordered_json::parse(R"({
  "type": "object",
  "required": ["run_id", "seed", "families", "scores", "task_ranking",
               "matrices", "graphs", "timings", "task_stats", "determinism_hash"],
  "additionalProperties": false,
  "properties": {
    "run_id": {"type": "string"},
    "seed": {"type": "integer"},
    "families": {"type": "array", "items": {"type": "string",
      "enum": ["LWPR", "KNN", "SVR", "XGBOOST", "MLP", "GPR"]}},
    "scores": {"type": "object", "additionalProperties": {"type": "number"}},
    "task_ranking": {"type": "array", "items": {"type": "string",
      "enum": ["H", "V", "LR", "RL", "E", "P"]}},
    "matrices": {"type": "array", "items": {"type": "string"}},
    "graphs": {"type": "array", "items": {"type": "string"}},
    "timings": {"type": "object", "additionalProperties": {"type": "number"}},
    "task_stats": {"type": "object", "additionalProperties": {"type": "array",
      "items": {"type": "object",
        "required": ["task", "count", "mean"],
        "additionalProperties": false,
        "properties": {"task": {"type": "string"},
                        "count": {"type": "integer"},
                        "mean": {"type": "number"}}}}},
    "determinism_hash": {"type": "string"}
  }
})");
}

namespace detail {

// One benchmark dataset per (subject, task): trials read back from disk,
// averaged onto the common grid, then turned into supervised pairs.
inline std::map<std::string, std::map<int, TaskDataset>> load_benchmark_datasets(
    const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path data_dir = fs::path(cfg.output_dir) / "data";
    const fs::path manifest_path = data_dir / "manifest.json";
    std::ifstream in = open_in(manifest_path.string());
    nlohmann::json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("unparseable manifest: " + std::string(e.what()));
    }
    std::set<std::string> wanted_subjects;
    for (int s = 0; s < cfg.subjects; ++s)
        wanted_subjects.insert("S" + std::to_string(s + 1));
    std::set<int> wanted_tasks;
    for (TaskLabel t : cfg.tasks) wanted_tasks.insert(task_index(t));

    std::map<std::string, std::map<int, std::vector<Trial>>> trials;
    try {
        for (const auto& entry : manifest.at("files")) {
            const std::string subject = entry.at("subject").get<std::string>();
            const TaskLabel task = parse_task(entry.at("task").get<std::string>());
            if (!wanted_subjects.count(subject) || !wanted_tasks.count(task_index(task)))
                continue;
            const fs::path p =
                fs::path(cfg.output_dir) / entry.at("path").get<std::string>();
            trials[subject][task_index(task)].push_back(read_trial_csv(p.string()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("bad manifest entry: " + std::string(e.what()));
    }

    std::map<std::string, std::map<int, TaskDataset>> out;
    for (const std::string& subject : wanted_subjects) {
        if (!trials.count(subject))
            throw MissingTask("no generated data for subject " + subject);
        for (TaskLabel t : cfg.tasks) {
            auto& by_task = trials.at(subject);
            if (!by_task.count(task_index(t)))
                throw MissingTask("subject " + subject + " misses task " +
                                  std::string(to_string(t)));
            const Trial averaged = average_trials(by_task.at(task_index(t)), cfg.common_len);
            TaskDataset ds = build_pairs(averaged);
            validate_dataset(ds, cfg.dims);
            out[subject][task_index(t)] = std::move(ds);
        }
    }
    return out;
}

}  // namespace detail

// Full evaluation pass: per-family per-subject cross-task matrices, subject
// averaged graphs, family scores, threshold stats, the cross-family task
// ranking, and mean fit times, all written under <output_dir>/results.
inline nlohmann::ordered_json cmd_benchmark(const RunConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    const fs::path results_dir = fs::path(cfg.output_dir) / "results";
    std::error_code ec;
    fs::create_directories(results_dir, ec);
    if (ec) throw IoFailure("cannot create " + results_dir.string());

    const auto datasets = detail::load_benchmark_datasets(cfg);

    nlohmann::ordered_json summary;
    const std::string config_dump = config_json(cfg).dump();
    summary["run_id"] = detail::hex64(mix_seed(cfg.seed, detail::fnv1a(config_dump)));
    summary["seed"] = cfg.seed;
    summary["families"] = nlohmann::ordered_json::array();
    for (Family f : cfg.families) summary["families"].push_back(to_string(f));
    nlohmann::ordered_json scores = nlohmann::ordered_json::object();
    nlohmann::ordered_json matrices = nlohmann::ordered_json::array();
    nlohmann::ordered_json graphs = nlohmann::ordered_json::array();
    nlohmann::ordered_json task_stats = nlohmann::ordered_json::object();

    std::vector<FitTiming> timings;
    std::map<Family, std::map<TaskLabel, double>> family_task_scores;

    for (Family family : cfg.families) {
        std::vector<TotalGrid> grids;
        for (int s = 0; s < cfg.subjects; ++s) {
            const std::string subject = "S" + std::to_string(s + 1);
            std::vector<TaskDataset> ds_list;
            std::vector<FoldPlan> plans;
            for (TaskLabel t : cfg.tasks) {
                const TaskDataset& ds = datasets.at(subject).at(task_index(t));
                ds_list.push_back(ds);
                plans.push_back(make_folds(static_cast<int>(ds.rows()), cfg.fold_count,
                                           derive_seed({cfg.seed, 0x666f6c64ull,
                                                        static_cast<std::uint64_t>(s),
                                                        static_cast<std::uint64_t>(task_index(t))})));
            }
            ModelSpec spec;
            spec.family = family;
            spec.hp = cfg.hyperparams;
            spec.seed = derive_seed({cfg.seed, 0x62656e63ull, static_cast<std::uint64_t>(s)});
            CrossTaskMatrix matrix;
            try {
                matrix = cross_task_grid(spec, ds_list, plans, &timings);
            } catch (const Error& e) {
                throw NonConvergence("family " + std::string(to_string(family)) +
                                     ", subject " + subject + ": " + e.what());
            }
            matrix.subject = subject;
            const std::string matrix_name =
                "matrix_" + std::string(to_string(family)) + "_" + subject + ".csv";
            write_matrix_csv(matrix, (results_dir / matrix_name).string());
            matrices.push_back((fs::path("results") / matrix_name).generic_string());
            grids.push_back(TotalGrid::from_matrix(matrix));
        }
        const GeneralizabilityGraph graph = build_graph(family, grids);
        const std::string dot_name = "graph_" + std::string(to_string(family)) + ".dot";
        const std::string json_name = "graph_" + std::string(to_string(family)) + ".json";
        write_graph_dot(graph, (results_dir / dot_name).string());
        write_graph_json(graph, (results_dir / json_name).string());
        graphs.push_back((fs::path("results") / dot_name).generic_string());
        graphs.push_back((fs::path("results") / json_name).generic_string());
        scores[to_string(family)] = graph.score;

        nlohmann::ordered_json stats = nlohmann::ordered_json::array();
        for (const TaskStats& st : task_generalizability(grids, cfg.edge_threshold)) {
            stats.push_back({{"task", to_string(st.task)},
                             {"count", st.count},
                             {"mean", st.mean}});
        }
        task_stats[to_string(family)] = stats;

        const auto n = static_cast<Eigen::Index>(graph.labels.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            double acc = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) acc += graph.edges(i, j);
            family_task_scores[family][graph.labels[static_cast<std::size_t>(i)]] =
                n > 1 ? acc / static_cast<double>(n - 1) : graph.edges(i, i);
        }
    }

    const TaskRanking ranking = task_ranking_over(family_task_scores);
    nlohmann::ordered_json ranking_json = nlohmann::ordered_json::array();
    for (TaskLabel t : ranking.order) ranking_json.push_back(to_string(t));

    nlohmann::ordered_json timing_json = nlohmann::ordered_json::object();
    for (const auto& [family, mean_s] : timing_report(std::span<const FitTiming>(timings)))
        timing_json[to_string(family)] = mean_s;

    summary["scores"] = scores;
    summary["task_ranking"] = ranking_json;
    summary["matrices"] = matrices;
    summary["graphs"] = graphs;
    summary["timings"] = timing_json;
    summary["task_stats"] = task_stats;

    nlohmann::ordered_json hashed = summary;
    hashed.erase("timings");
    summary["determinism_hash"] = detail::hex64(detail::fnv1a(hashed.dump()));

    validate_against_schema(summary, summary_schema());
    {
        std::ofstream out = detail::open_out((results_dir / "summary.json").string());
        out << summary.dump(2) << "\n";
        if (!out) throw IoFailure("failed writing summary");
    }
    return summary;
}

struct FixtureRankReport {
    std::map<Family, double> scores;
    std::map<Family, double> scores_off_diagonal;
    std::vector<Family> ranking;
    bool tie = false;
    bool matches_reference = false;
    std::string message;
};

// Scores every family over the transcribed per-subject grids and compares the
// resulting order against the reference ranking.
inline FixtureRankReport fixture_rank(const std::string& fixture_csv) {
    const FixtureTable table = load_fixture(fixture_csv);
    FixtureRankReport report;
    for (Family f : kAllFamilies) {
        const auto grids = table.subject_grids(f);
        const GeneralizabilityGraph g = build_graph(f, grids);
        report.scores[f] = g.score;
        report.scores_off_diagonal[f] = g.score_off_diagonal;
    }
    report.ranking.assign(kAllFamilies.begin(), kAllFamilies.end());
    std::stable_sort(report.ranking.begin(), report.ranking.end(),
                     [&](Family a, Family b) { return report.scores[a] > report.scores[b]; });
    for (std::size_t i = 0; i + 1 < report.ranking.size(); ++i)
        if (report.scores[report.ranking[i]] == report.scores[report.ranking[i + 1]])
            report.tie = true;

    const std::vector<Family> reference = {Family::XGBOOST, Family::GPR, Family::KNN,
                                           Family::LWPR, Family::SVR, Family::MLP};
    report.matches_reference = !report.tie && report.ranking == reference;
    if (report.tie)
        report.message = "tie between families at the same score";
    else if (!report.matches_reference)
        report.message = "ranking differs from the reference order";
    else
        report.message = "ranking matches the reference order";
    return report;
}

inline int cmd_fixture_rank(const std::string& fixture_csv, std::ostream& os = std::cout) {
    const FixtureRankReport report = fixture_rank(fixture_csv);
    os << "family scores (all-edge mean | off-diagonal mean):\n";
    for (Family f : report.ranking)
        os << "  " << to_string(f) << ": " << report.scores.at(f) << " | "
           << report.scores_off_diagonal.at(f) << "\n";
    os << "ranking:";
    for (Family f : report.ranking) os << " " << to_string(f);
    os << "\n" << report.message << "\n";
    return report.matches_reference ? 0 : 3;
}

}  // namespace exodyn
