#pragma once

#include <algorithm>
#include <vector>

#include "exodyn/model.hpp"

namespace exodyn {

// Distance-weighted k-nearest-neighbor regression. Distance is the
// per-coordinate absolute difference summed with unit coefficients; weights
// are normalized ((1+d)^-1)^p. All output channels share the neighbor set.
class KnnModel final : public FamilyModel {
  public:
    Matrix X;  // standardized training inputs
    Matrix Y;
    int k = 1;
    double weight_power = 2.0;

    Family family() const override { return Family::KNN; }
    int output_dim() const override { return static_cast<int>(Y.cols()); }

    // indices of the k nearest rows plus their normalized weights;
    // ties broken by row index so predictions are deterministic
    std::pair<std::vector<int>, Vector> neighbors(const Vector& xs) const {
        std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(X.rows()));
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            dist[static_cast<std::size_t>(i)] = {
                (X.row(i).transpose() - xs).cwiseAbs().sum(), static_cast<int>(i)};
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        std::vector<int> idx(static_cast<std::size_t>(k));
        Vector w(k);
        for (int j = 0; j < k; ++j) {
            idx[static_cast<std::size_t>(j)] = dist[static_cast<std::size_t>(j)].second;
            w(j) = std::pow(1.0 / (1.0 + dist[static_cast<std::size_t>(j)].first),
                            weight_power);
        }
        w /= w.sum();
        return {idx, w};
    }

    Vector predict_std(const Vector& xs) const override {
        auto [idx, w] = neighbors(xs);
        Vector out = Vector::Zero(Y.cols());
        for (int j = 0; j < k; ++j) out += w(j) * Y.row(idx[static_cast<std::size_t>(j)]).transpose();
        return out;
    }

    json payload_json() const override {
        return json{{"X", matrix_json(X)}, {"Y", matrix_json(Y)}, {"k", k},
                    {"weight_power", weight_power}};
    }
};

namespace detail {

// Validation MSE for every candidate k at once: sort neighbors, then prefix
// sums over the sorted weighted targets give all-k predictions in one sweep.
inline void knn_candidate_errors(const Matrix& Xtr, const Matrix& Ytr,
                                 const Matrix& Xval, const Matrix& Yval,
                                 double weight_power,
                                 const std::vector<int>& candidates,
                                 std::vector<double>& sse) {
    const Eigen::Index ntr = Xtr.rows();
    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(ntr));
    Vector wsum(ntr);
    Matrix wysum(ntr, Ytr.cols());
    for (Eigen::Index q = 0; q < Xval.rows(); ++q) {
        for (Eigen::Index i = 0; i < ntr; ++i)
            dist[static_cast<std::size_t>(i)] = {
                (Xtr.row(i) - Xval.row(q)).cwiseAbs().sum(), static_cast<int>(i)};
        std::sort(dist.begin(), dist.end());
        double acc_w = 0.0;
        Vector acc_wy = Vector::Zero(Ytr.cols());
        for (Eigen::Index j = 0; j < ntr; ++j) {
            const auto& [dj, ij] = dist[static_cast<std::size_t>(j)];
            const double w = std::pow(1.0 / (1.0 + dj), weight_power);
            acc_w += w;
            acc_wy += w * Ytr.row(ij).transpose();
            wsum(j) = acc_w;
            wysum.row(j) = acc_wy.transpose();
        }
        for (std::size_t ci = 0; ci < candidates.size(); ++ci) {
            const int kc = std::min<int>(candidates[ci], static_cast<int>(ntr));
            const Vector pred = wysum.row(kc - 1).transpose() / wsum(kc - 1);
            sse[ci] += (pred - Yval.row(q).transpose()).squaredNorm();
        }
    }
}

}  // namespace detail

inline std::shared_ptr<FamilyModel> fit_knn(const Matrix& Xs, const Matrix& Y,
                                            const ModelSpec& spec) {
    const auto& hp = spec.hp.knn;
    const int n = static_cast<int>(Xs.rows());
    auto m = std::make_shared<KnnModel>();
    m->X = Xs;
    m->Y = Y;
    m->weight_power = hp.weight_power;

    if (hp.k > 0) {
        if (hp.k > n)
            throw KTooLarge("k=" + std::to_string(hp.k) + " exceeds " +
                            std::to_string(n) + " training rows");
        m->k = hp.k;
        return m;
    }

    // inner CV over odd k up to min(cap, n/2)
    std::vector<int> candidates;
    for (int kc = 1; kc <= std::min(hp.k_cap, n / 2); kc += 2) candidates.push_back(kc);
    if (candidates.empty()) candidates.push_back(1);
    if (candidates.size() == 1) {
        m->k = candidates.front();
        return m;
    }

    const int folds = std::min(hp.cv_folds, n);
    FoldPlan plan = make_folds(n, folds, derive_seed({spec.seed, 0x6b6e6eull}));
    std::vector<double> sse(candidates.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        const auto tr = fold_rows(plan, f, false);
        const auto va = fold_rows(plan, f, true);
        if (tr.empty() || va.empty()) continue;
        detail::knn_candidate_errors(take_rows(Xs, tr), take_rows(Y, tr),
                                     take_rows(Xs, va), take_rows(Y, va),
                                     hp.weight_power, candidates, sse);
    }
    std::size_t best = 0;
    for (std::size_t ci = 1; ci < candidates.size(); ++ci)
        if (sse[ci] < sse[best]) best = ci;
    m->k = candidates[best];
    return m;
}

}  // namespace exodyn
