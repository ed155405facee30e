#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "exodyn/evaluation.hpp"

namespace exodyn {

namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& tok, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw SchemaError("bad numeric value '" + tok + "' in " + where);
    }
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    return out;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open " + path + " for reading");
    return in;
}

}  // namespace detail

// Appendix-style layout: one block of three metric rows (r2, rmse, mae of the
// channel-averaged totals) per train task, columns in test-task order.
inline void write_matrix_csv(const CrossTaskMatrix& m, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "family," << to_string(m.family) << "\n";
    out << "subject," << m.subject << "\n";
    out << "train_task,metric";
    for (TaskLabel t : m.labels) out << "," << to_string(t);
    out << "\n";
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        const char* names[3] = {"r2", "rmse", "mae"};
        for (int k = 0; k < 3; ++k) {
            out << to_string(m.labels[i]) << "," << names[k];
            for (std::size_t j = 0; j < m.labels.size(); ++j) {
                const MetricSet& c = m.cell(i, j);
                const double v = k == 0 ? c.r2 : (k == 1 ? c.rmse : c.mae);
                out << "," << detail::fmt_double(v);
            }
            out << "\n";
        }
    }
    if (!out) throw IoFailure("failed writing " + path);
}

// Reads the totals back; per-channel vectors stay empty.
inline CrossTaskMatrix read_matrix_csv(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    std::string line;
    CrossTaskMatrix m;
    if (!std::getline(in, line)) throw SchemaError("empty matrix file " + path);
    auto kv = detail::split_csv_line(line);
    if (kv.size() != 2 || kv[0] != "family")
        throw SchemaError("matrix file " + path + " misses the family line");
    m.family = parse_family(kv[1]);
    if (!std::getline(in, line)) throw SchemaError("truncated matrix file " + path);
    kv = detail::split_csv_line(line);
    if (kv.size() != 2 || kv[0] != "subject")
        throw SchemaError("matrix file " + path + " misses the subject line");
    m.subject = kv[1];
    if (!std::getline(in, line)) throw SchemaError("truncated matrix file " + path);
    auto header = detail::split_csv_line(line);
    if (header.size() < 3 || header[0] != "train_task" || header[1] != "metric")
        throw SchemaError("matrix file " + path + " has a bad header");
    for (std::size_t j = 2; j < header.size(); ++j)
        m.labels.push_back(parse_task(header[j]));
    const std::size_t n = m.labels.size();
    m.cells.assign(n, std::vector<MetricSet>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const char* names[3] = {"r2", "rmse", "mae"};
        for (int k = 0; k < 3; ++k) {
            if (!std::getline(in, line))
                throw SchemaError("matrix file " + path + " is truncated");
            auto row = detail::split_csv_line(line);
            if (row.size() != n + 2 || parse_task(row[0]) != m.labels[i] ||
                row[1] != names[k])
                throw SchemaError("matrix file " + path + " row order is wrong");
            for (std::size_t j = 0; j < n; ++j) {
                const double v = detail::parse_double(row[j + 2], path);
                MetricSet& c = m.cells[i][j];
                if (k == 0)
                    c.r2 = v;
                else if (k == 1)
                    c.rmse = v;
                else
                    c.mae = v;
            }
        }
    }
    return m;
}

inline void write_graph_dot(const GeneralizabilityGraph& g, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "digraph " << to_string(g.family) << " {\n";
    out << "  graph [score=\"" << detail::fmt_double(g.score)
        << "\", score_off_diagonal=\"" << detail::fmt_double(g.score_off_diagonal)
        << "\"];\n";
    for (std::size_t i = 0; i < g.labels.size(); ++i)
        for (std::size_t j = 0; j < g.labels.size(); ++j)
            out << "  " << to_string(g.labels[i]) << " -> " << to_string(g.labels[j])
                << " [weight=\""
                << detail::fmt_double(g.edges(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)))
                << "\"];\n";
    out << "}\n";
    if (!out) throw IoFailure("failed writing " + path);
}

inline GeneralizabilityGraph read_graph_dot(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    std::string line;
    GeneralizabilityGraph g;
    if (!std::getline(in, line)) throw SchemaError("empty dot file " + path);
    {
        std::istringstream is(line);
        std::string kw, name;
        is >> kw >> name;
        if (kw != "digraph") throw SchemaError("dot file " + path + " is not a digraph");
        g.family = parse_family(name);
    }
    auto quoted = [&](const std::string& text, const std::string& key) {
        const std::string tag = key + "=\"";
        const auto at = text.find(tag);
        if (at == std::string::npos)
            throw SchemaError("dot file " + path + " misses attribute " + key);
        const auto end = text.find('"', at + tag.size());
        return detail::parse_double(text.substr(at + tag.size(), end - at - tag.size()),
                                    path);
    };
    std::vector<std::tuple<TaskLabel, TaskLabel, double>> edges;
    while (std::getline(in, line)) {
        if (line.find("graph [") != std::string::npos) {
            g.score = quoted(line, "score");
            g.score_off_diagonal = quoted(line, "score_off_diagonal");
            continue;
        }
        const auto arrow = line.find("->");
        if (arrow == std::string::npos) continue;
        std::istringstream is(line);
        std::string from, op, to_tok;
        is >> from >> op >> to_tok;
        edges.emplace_back(parse_task(from), parse_task(to_tok), quoted(line, "weight"));
        if (std::find(g.labels.begin(), g.labels.end(), parse_task(from)) ==
            g.labels.end())
            g.labels.push_back(parse_task(from));
    }
    const auto n = static_cast<Eigen::Index>(g.labels.size());
    if (edges.size() != static_cast<std::size_t>(n * n))
        throw SchemaError("dot file " + path + " has an incomplete edge set");
    g.edges = Matrix::Zero(n, n);
    auto index_of = [&](TaskLabel t) {
        for (Eigen::Index i = 0; i < n; ++i)
            if (g.labels[static_cast<std::size_t>(i)] == t) return i;
        throw SchemaError("dot file " + path + " has an unknown node");
    };
    for (const auto& [from, to_task, w] : edges) g.edges(index_of(from), index_of(to_task)) = w;
    return g;
}

inline nlohmann::ordered_json graph_json(const GeneralizabilityGraph& g) {
    nlohmann::ordered_json j;
    j["family"] = to_string(g.family);
    j["score"] = g.score;
    j["score_off_diagonal"] = g.score_off_diagonal;
    nlohmann::ordered_json adj;
    for (std::size_t i = 0; i < g.labels.size(); ++i) {
        nlohmann::ordered_json row;
        for (std::size_t j2 = 0; j2 < g.labels.size(); ++j2)
            row[to_string(g.labels[j2])] = g.edges(static_cast<Eigen::Index>(i),
                                                   static_cast<Eigen::Index>(j2));
        adj[to_string(g.labels[i])] = row;
    }
    j["edges"] = adj;
    return j;
}

template <typename JsonT>
inline GeneralizabilityGraph graph_from_json(const JsonT& j) {
    GeneralizabilityGraph g;
    try {
        g.family = parse_family(j.at("family").template get<std::string>());
        g.score = j.at("score").template get<double>();
        g.score_off_diagonal = j.at("score_off_diagonal").template get<double>();
        const auto& adj = j.at("edges");
        for (auto it = adj.begin(); it != adj.end(); ++it)
            g.labels.push_back(parse_task(it.key()));
        const auto n = static_cast<Eigen::Index>(g.labels.size());
        g.edges = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = adj.at(to_string(g.labels[static_cast<std::size_t>(i)]));
            for (Eigen::Index j2 = 0; j2 < n; ++j2)
                g.edges(i, j2) = row.at(to_string(g.labels[static_cast<std::size_t>(j2)]))
                                     .template get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("bad graph json: ") + e.what());
    }
    return g;
}

inline void write_graph_json(const GeneralizabilityGraph& g, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << graph_json(g).dump(2) << "\n";
    if (!out) throw IoFailure("failed writing " + path);
}

inline GeneralizabilityGraph read_graph_json(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    nlohmann::ordered_json j;  // keep the writer's label order
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("unparseable graph json " + path + ": " + e.what());
    }
    return graph_from_json(j);
}

// Fixture rows: per-family per-subject total-R2 grids over the full task set.
struct FixtureTable {
    std::map<Family, std::map<std::string, TotalGrid>> grids;

    std::vector<TotalGrid> subject_grids(Family f) const {
        std::vector<TotalGrid> out;
        for (const auto& [subject, grid] : grids.at(f)) out.push_back(grid);
        return out;
    }
};

inline FixtureTable load_fixture(const std::string& path) {
    std::ifstream in = detail::open_in(path);
    std::string line;
    bool header_seen = false;
    std::map<Family, std::map<std::string, std::map<std::pair<int, int>, double>>> raw;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto tok = detail::split_csv_line(line);
        const std::string where = path + ":" + std::to_string(lineno);
        if (!header_seen) {
            if (tok != std::vector<std::string>{"family", "subject", "train_task",
                                                "test_task", "r2_total"})
                throw SchemaError("fixture header mismatch at " + where);
            header_seen = true;
            continue;
        }
        if (tok.size() != 5) throw SchemaError("fixture row width at " + where);
        Family fam;
        TaskLabel tr, te;
        try {
            fam = parse_family(tok[0]);
            tr = parse_task(tok[2]);
            te = parse_task(tok[3]);
        } catch (const Error& e) {
            throw SchemaError(std::string(e.what()) + " at " + where);
        }
        const double v = detail::parse_double(tok[4], where);
        auto& cell = raw[fam][tok[1]][{task_index(tr), task_index(te)}];
        cell = v;
    }
    if (!header_seen) throw SchemaError("fixture " + path + " has no header");
    FixtureTable table;
    for (Family f : kAllFamilies)
        if (!raw.count(f))
            throw SchemaError("fixture " + path + " misses family " +
                              std::string(to_string(f)));
    for (const auto& [fam, subjects] : raw) {
        for (const auto& [subject, cells] : subjects) {
            if (cells.size() != kAllTasks.size() * kAllTasks.size())
                throw SchemaError("fixture " + path + " family " +
                                  std::string(to_string(fam)) + " subject " + subject +
                                  " has " + std::to_string(cells.size()) +
                                  " cells, expected 36");
            TotalGrid g;
            g.subject = subject;
            g.labels.assign(kAllTasks.begin(), kAllTasks.end());
            const auto n = static_cast<Eigen::Index>(kAllTasks.size());
            g.r2.resize(n, n);
            for (const auto& [key, v] : cells) g.r2(key.first, key.second) = v;
            table.grids[fam][subject] = g;
        }
    }
    return table;
}

}  // namespace exodyn
