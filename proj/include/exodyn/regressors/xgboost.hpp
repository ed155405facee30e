#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "exodyn/model.hpp"

namespace exodyn {

// Regression tree node; feature < 0 marks a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double eval(const Vector& x) const {
        int at = 0;
        while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const TreeNode& nd = nodes[static_cast<std::size_t>(at)];
            at = x(nd.feature) < nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(at)].value;
    }
};

namespace detail {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exact greedy split search over presorted per-feature row lists. Gradients
// use the squared-error convention g = prediction - target, h = 1.
inline SplitChoice best_split(const Matrix& X, const Vector& g,
                              const std::vector<std::vector<int>>& sorted_rows,
                              double lambda) {
    SplitChoice best;
    const double n_node = static_cast<double>(sorted_rows.front().size());
    double G = 0.0;
    for (int r : sorted_rows.front()) G += g(r);
    const double parent = G * G / (n_node + lambda);
    for (std::size_t f = 0; f < sorted_rows.size(); ++f) {
        const auto& rows = sorted_rows[f];
        double GL = 0.0, HL = 0.0;
        for (std::size_t pos = 0; pos + 1 < rows.size(); ++pos) {
            GL += g(rows[pos]);
            HL += 1.0;
            const double xl = X(rows[pos], static_cast<Eigen::Index>(f));
            const double xr = X(rows[pos + 1], static_cast<Eigen::Index>(f));
            if (xl == xr) continue;
            const double GR = G - GL, HR = n_node - HL;
            const double gain =
                0.5 * (GL * GL / (HL + lambda) + GR * GR / (HR + lambda) - parent);
            if (!best.found || gain > best.gain) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (xl + xr);
                best.gain = gain;
            }
        }
    }
    return best;
}

inline int grow_tree(Tree& tree, const Matrix& X, const Vector& g,
                     std::vector<std::vector<int>> sorted_rows, int depth,
                     const XgbParams& hp) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    double G = 0.0;
    const double H = static_cast<double>(sorted_rows.front().size());
    for (int r : sorted_rows.front()) G += g(r);

    SplitChoice split;
    if (depth < hp.max_depth && sorted_rows.front().size() >= 2)
        split = best_split(X, g, sorted_rows, hp.reg_lambda);
    if (!split.found || !(split.gain > hp.gamma)) {
        tree.nodes[static_cast<std::size_t>(id)].value = -G / (H + hp.reg_lambda);
        return id;
    }

    std::vector<char> goes_left(static_cast<std::size_t>(X.rows()), 0);
    for (int r : sorted_rows.front())
        goes_left[static_cast<std::size_t>(r)] =
            X(r, split.feature) < split.threshold ? 1 : 0;
    std::vector<std::vector<int>> left_rows(sorted_rows.size()), right_rows(sorted_rows.size());
    for (std::size_t f = 0; f < sorted_rows.size(); ++f) {
        for (int r : sorted_rows[f])
            (goes_left[static_cast<std::size_t>(r)] ? left_rows[f] : right_rows[f]).push_back(r);
    }
    const int left = grow_tree(tree, X, g, std::move(left_rows), depth + 1, hp);
    const int right = grow_tree(tree, X, g, std::move(right_rows), depth + 1, hp);
    TreeNode& nd = tree.nodes[static_cast<std::size_t>(id)];
    nd.feature = split.feature;
    nd.threshold = split.threshold;
    nd.left = left;
    nd.right = right;
    return id;
}

}  // namespace detail

class XgbModel final : public FamilyModel {
  public:
    std::vector<std::vector<Tree>> channels;  // per output, per round
    double learning_rate = 0.3;

    Family family() const override { return Family::XGBOOST; }
    int output_dim() const override { return static_cast<int>(channels.size()); }

    Vector predict_std(const Vector& xs) const override {
        Vector out = Vector::Zero(output_dim());
        for (std::size_t c = 0; c < channels.size(); ++c) {
            double acc = 0.0;
            for (const Tree& t : channels[c]) acc += t.eval(xs);
            out(static_cast<Eigen::Index>(c)) = learning_rate * acc;
        }
        return out;
    }

    json payload_json() const override {
        json chans = json::array();
        for (const auto& trees : channels) {
            json jtrees = json::array();
            for (const Tree& t : trees) {
                json nodes = json::array();
                for (const TreeNode& nd : t.nodes)
                    nodes.push_back(json::array({nd.feature, nd.threshold, nd.left,
                                                 nd.right, nd.value}));
                jtrees.push_back(std::move(nodes));
            }
            chans.push_back(std::move(jtrees));
        }
        return json{{"channels", std::move(chans)}, {"learning_rate", learning_rate}};
    }
};

inline std::shared_ptr<FamilyModel> fit_xgboost(const Matrix& Xs, const Matrix& Y,
                                                const ModelSpec& spec) {
    const auto& hp = spec.hp.xgb;
    auto m = std::make_shared<XgbModel>();
    m->learning_rate = hp.learning_rate;
    m->channels.resize(static_cast<std::size_t>(Y.cols()));

    // presort once per feature; node recursions keep the order by stable partition
    std::vector<std::vector<int>> base_order(static_cast<std::size_t>(Xs.cols()));
    for (Eigen::Index f = 0; f < Xs.cols(); ++f) {
        auto& ord = base_order[static_cast<std::size_t>(f)];
        ord.resize(static_cast<std::size_t>(Xs.rows()));
        std::iota(ord.begin(), ord.end(), 0);
        std::stable_sort(ord.begin(), ord.end(),
                         [&](int a, int b) { return Xs(a, f) < Xs(b, f); });
    }

    for (Eigen::Index c = 0; c < Y.cols(); ++c) {
        Vector pred = Vector::Zero(Xs.rows());
        auto& trees = m->channels[static_cast<std::size_t>(c)];
        trees.reserve(static_cast<std::size_t>(hp.rounds));
        for (int round = 0; round < hp.rounds; ++round) {
            const Vector g = pred - Y.col(c);
            Tree tree;
            detail::grow_tree(tree, Xs, g, base_order, 0, hp);
            for (Eigen::Index i = 0; i < Xs.rows(); ++i)
                pred(i) += hp.learning_rate * tree.eval(Xs.row(i).transpose());
            trees.push_back(std::move(tree));
        }
    }
    return m;
}

}  // namespace exodyn
