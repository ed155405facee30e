// Acceptance gate. Each criterion runs standalone, prints one PASS/FAIL line
// with its wall time, and logs supporting numbers indented beneath it. The
// process exits nonzero if any criterion fails. No test framework: the checks
// here are the contract, so they stay free of fixture magic and macros.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "exodyn/exodyn.hpp"

using namespace exodyn;

namespace {

std::vector<std::string> g_fail;  // failures of the criterion being run
std::vector<std::string> g_note;  // informational lines printed either way

void require(bool ok, const std::string& what) {
    if (!ok) g_fail.push_back(what);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
// Ranking the transcribed per-subject grids must reproduce the reference
// family order. Scores are logged so they can be compared against the
// reference values 84.93 / 82.31 / 76.79 / 69.31 / 63.31 / 55.65, but the
// exact values are not asserted.
void c1_fixture_ranking() {
    const std::string path = EXODYN_SOURCE_DIR "/data/appendix_fixture.csv";
    const FixtureRankReport report = fixture_rank(path);

    std::string order;
    for (Family f : report.ranking) {
        g_note.push_back(std::string(to_string(f)) + " score " +
                         fmt(report.scores.at(f)) + " (off-diagonal mean " +
                         fmt(report.scores_off_diagonal.at(f)) + ")");
        order += order.empty() ? "" : " > ";
        order += to_string(f);
    }

    std::ostringstream os;
    const int rc = cmd_fixture_rank(path, os);
    require(rc == (report.matches_reference ? 0 : 3),
            "command exit code disagrees with the ranking report");
    require(!report.tie, "two families share the same fixture score");
    require(report.matches_reference,
            "computed ranking " + order +
                ", expected XGBOOST > GPR > KNN > LWPR > SVR > MLP");
}

// ---------------------------------------------------------------- criterion 2
// r_squared, rmse and mae against plain-loop reimplementations.
void c2_metric_oracles() {
    SplitMix64 rng(0xacce9702ull);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int n = 2 + static_cast<int>(rng.below(40));
        Vector y(n), yh(n);
        for (int i = 0; i < n; ++i) {
            y(i) = rng.uniform(-3.0, 3.0);
            yh(i) = rng.uniform(-3.0, 3.0);
        }
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += y(i);
        mean /= n;
        double ss_tot = 0.0, ss_res = 0.0, abs_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            ss_tot += (y(i) - mean) * (y(i) - mean);
            const double e = y(i) - yh(i);
            ss_res += e * e;
            abs_sum += std::abs(e);
        }
        if (ss_tot == 0.0) continue;  // unreachable with continuous draws
        const double r2_ref = 100.0 * (1.0 - ss_res / ss_tot);
        const double rmse_ref = std::sqrt(ss_res / n);
        const double mae_ref = abs_sum / n;

        const auto [rmse, mae] = error_metrics(y, yh);
        worst = std::max({worst, std::abs(r_squared(y, yh) - r2_ref),
                          std::abs(rmse - rmse_ref), std::abs(mae - mae_ref)});
    }
    g_note.push_back("largest deviation from the brute-force metrics: " + fmt(worst));
    require(worst < 1e-12, "metric deviation " + fmt(worst) + " >= 1e-12");
}

// ---------------------------------------------------------------- criterion 3
// Gaussian process posterior mean and variance against a dense solve that
// inverts the training covariance outright.
void c3_gpr_dense() {
    double worst = 0.0;
    const double sqrt3 = std::sqrt(3.0);
    for (int rep = 0; rep < 50; ++rep) {
        SplitMix64 rng(derive_seed({0xacce9703ull, static_cast<std::uint64_t>(rep)}));
        const int n = 5 + static_cast<int>(rng.below(46));
        const int d = 1 + static_cast<int>(rng.below(6));
        const int L = 1 + static_cast<int>(rng.below(3));
        Matrix X(n, d), Y(n, L);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-2.0, 2.0);
            for (int c = 0; c < L; ++c) Y(i, c) = rng.uniform(-2.0, 2.0);
        }
        ModelSpec spec;
        spec.family = Family::GPR;
        spec.seed = derive_seed({17ull, static_cast<std::uint64_t>(rep)});
        auto fitted = fit_gpr(X, Y, spec);
        auto gpr = std::dynamic_pointer_cast<const GprModel>(fitted);
        require(gpr != nullptr, "gpr fit returned an unexpected model type");
        if (!gpr) return;
        const CompositeKernelParams& kp = gpr->kernel;
        const double c2 = kp.constant_value * kp.constant_value;

        auto pair_cov = [&](const Vector& a, const Vector& b) {
            double sq = 0.0;
            for (int j = 0; j < d; ++j) sq += (a(j) - b(j)) * (a(j) - b(j));
            const double s = sqrt3 * std::sqrt(sq) / kp.matern_length_scale;
            return c2 + (1.0 + s) * std::exp(-s);
        };

        Matrix K(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                K(i, j) = pair_cov(X.row(i).transpose(), X.row(j).transpose());
        K.diagonal().array() += kp.white_noise * kp.white_noise + gpr->jitter;
        const Matrix Kinv = K.inverse();
        const Matrix alpha_ref = Kinv * Y;

        for (int q = 0; q < 10; ++q) {
            Vector xq(d);
            for (int j = 0; j < d; ++j) xq(j) = rng.uniform(-2.5, 2.5);
            Vector kq(n);
            for (int i = 0; i < n; ++i) kq(i) = pair_cov(X.row(i).transpose(), xq);
            const Vector mean_ref = alpha_ref.transpose() * kq;
            const double var_ref = (c2 + 1.0) - kq.dot(Kinv * kq);

            const Vector mean_got = fitted->predict_std(xq);
            const Vector var_got = fitted->predict_variance_std(xq);
            worst = std::max(worst, (mean_got - mean_ref).cwiseAbs().maxCoeff());
            for (int c = 0; c < L; ++c)
                worst = std::max(worst, std::abs(var_got(c) - var_ref));
        }
    }
    g_note.push_back("largest deviation from the dense posterior: " + fmt(worst));
    require(worst < 1e-8, "posterior deviation " + fmt(worst) + " >= 1e-8");
}

// ---------------------------------------------------------------- criterion 4
// Nearest-neighbor predictions against exhaustive search with the same
// distance, weighting and tie-break conventions.
void c4_knn_exhaustive() {
    SplitMix64 rng(0xacce9704ull);
    double worst = 0.0;
    const double powers[4] = {0.5, 1.0, 2.0, 3.0};
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 8 + static_cast<int>(rng.below(40));
        const int d = 1 + static_cast<int>(rng.below(6));
        const int L = 1 + static_cast<int>(rng.below(3));
        KnnModel m;
        m.X.resize(n, d);
        m.Y.resize(n, L);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) m.X(i, j) = rng.uniform(-2.0, 2.0);
            for (int c = 0; c < L; ++c) m.Y(i, c) = rng.uniform(-2.0, 2.0);
        }
        if (rep % 4 == 0) m.X.row(n / 2) = m.X.row(0);  // force a distance tie
        m.k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(std::min(n, 9))));
        m.weight_power = powers[rng.below(4)];

        Vector q(d);
        for (int j = 0; j < d; ++j) q(j) = rng.uniform(-2.0, 2.0);
        if (rep % 5 == 0) q = m.X.row(static_cast<int>(rng.below(n))).transpose();

        std::vector<std::pair<double, int>> dist;
        for (int i = 0; i < n; ++i) {
            double l1 = 0.0;
            for (int j = 0; j < d; ++j) l1 += std::abs(m.X(i, j) - q(j));
            dist.emplace_back(l1, i);
        }
        std::sort(dist.begin(), dist.end());
        double wsum = 0.0;
        std::vector<double> w(static_cast<std::size_t>(m.k));
        for (int j = 0; j < m.k; ++j) {
            w[static_cast<std::size_t>(j)] =
                std::pow(1.0 / (1.0 + dist[static_cast<std::size_t>(j)].first),
                         m.weight_power);
            wsum += w[static_cast<std::size_t>(j)];
        }
        Vector pred = Vector::Zero(L);
        for (int j = 0; j < m.k; ++j)
            pred += (w[static_cast<std::size_t>(j)] / wsum) *
                    m.Y.row(dist[static_cast<std::size_t>(j)].second).transpose();

        const Vector got = m.predict_std(q);
        worst = std::max(worst, (got - pred).cwiseAbs().maxCoeff());
    }
    g_note.push_back("largest deviation from exhaustive search: " + fmt(worst));
    require(worst < 1e-12, "knn deviation " + fmt(worst) + " >= 1e-12");
}

// ---------------------------------------------------------------- criterion 5
// The greedy split finder against full enumeration of every candidate split
// on one-feature datasets small enough to enumerate by hand.
void c5_xgb_splits() {
    SplitMix64 rng(0xacce9705ull);
    int splits_found = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng.below(7));
        Matrix X(n, 1);
        for (int i = 0; i < n; ++i) X(i, 0) = rng.uniform(-1.0, 1.0);
        if (rng.uniform() < 0.4)  // snap to a grid so duplicate values occur
            for (int i = 0; i < n; ++i) X(i, 0) = std::round(X(i, 0) * 2.0) / 2.0;
        Vector g(n);
        for (int i = 0; i < n; ++i) g(i) = rng.uniform(-2.0, 2.0);
        const double lambda = 0.5 + rng.uniform(0.0, 2.0);

        std::vector<std::vector<int>> sorted(1);
        sorted[0].resize(static_cast<std::size_t>(n));
        std::iota(sorted[0].begin(), sorted[0].end(), 0);
        std::stable_sort(sorted[0].begin(), sorted[0].end(),
                         [&](int a, int b) { return X(a, 0) < X(b, 0); });

        const detail::SplitChoice got = detail::best_split(X, g, sorted, lambda);

        double G = 0.0;
        for (int r : sorted[0]) G += g(r);
        const double parent = G * G / (static_cast<double>(n) + lambda);
        bool found = false;
        double best_gain = 0.0, best_threshold = 0.0;
        double GL = 0.0;
        for (int pos = 0; pos + 1 < n; ++pos) {
            GL += g(sorted[0][static_cast<std::size_t>(pos)]);
            const double xl = X(sorted[0][static_cast<std::size_t>(pos)], 0);
            const double xr = X(sorted[0][static_cast<std::size_t>(pos) + 1], 0);
            if (xl == xr) continue;
            const double HL = pos + 1, HR = n - HL, GR = G - GL;
            const double gain =
                0.5 * (GL * GL / (HL + lambda) + GR * GR / (HR + lambda) - parent);
            if (!found || gain > best_gain) {
                found = true;
                best_gain = gain;
                best_threshold = 0.5 * (xl + xr);
            }
        }

        if (got.found != found) {
            require(false, "instance " + std::to_string(rep) +
                               ": greedy and exhaustive disagree on splittability");
            continue;
        }
        if (!found) continue;
        ++splits_found;
        require(got.feature == 0, "instance " + std::to_string(rep) +
                                      ": split feature is not the only feature");
        require(got.threshold == best_threshold,
                "instance " + std::to_string(rep) + ": thresholds differ, " +
                    fmt(got.threshold) + " vs " + fmt(best_threshold));
        require(std::abs(got.gain - best_gain) <=
                    1e-12 * std::max(1.0, std::abs(best_gain)),
                "instance " + std::to_string(rep) + ": gains differ, " +
                    fmt(got.gain) + " vs " + fmt(best_gain));
    }
    g_note.push_back("instances with an admissible split: " +
                     std::to_string(splits_found) + " of 200");
    require(splits_found >= 150, "the generator produced too few splittable instances");
}

// ---------------------------------------------------------------- criterion 6
// Analytic network gradients against central finite differences, with
// pre-activations kept away from the relu kink so the comparison is valid.
void c6_mlp_gradients() {
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        SplitMix64 rng(derive_seed({0xacce9706ull, static_cast<std::uint64_t>(rep)}));
        const int d = 1 + static_cast<int>(rng.below(5));
        const int h = 2 + static_cast<int>(rng.below(6));
        const int n = 5 + static_cast<int>(rng.below(15));
        Matrix X(n, d);
        Vector y(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-2.0, 2.0);
            y(i) = rng.uniform(-2.0, 2.0);
        }
        const detail::MlpShape shape{d, h};
        Vector theta(shape.size());
        for (int attempt = 0; attempt < 1000; ++attempt) {
            for (int i = 0; i < shape.size(); ++i) theta(i) = rng.uniform(-1.0, 1.0);
            const auto nn = detail::unpack_net(theta, shape);
            const Matrix Z = (X * nn.W1.transpose()).rowwise() + nn.b1.transpose();
            if (Z.array().abs().minCoeff() > 1e-3) break;
        }

        Vector ga;
        detail::mlp_loss_grad(theta, shape, X, y, &ga);
        Vector gf(shape.size());
        const double step = 1e-5;
        for (int p = 0; p < shape.size(); ++p) {
            Vector tp = theta, tm = theta;
            tp(p) += step;
            tm(p) -= step;
            const double fp = detail::mlp_loss_grad(tp, shape, X, y, nullptr);
            const double fm = detail::mlp_loss_grad(tm, shape, X, y, nullptr);
            gf(p) = (fp - fm) / (2.0 * step);
        }
        const double rel =
            (ga - gf).norm() / std::max({ga.norm(), gf.norm(), 1e-12});
        worst = std::max(worst, rel);
    }
    g_note.push_back("largest relative gradient error: " + fmt(worst));
    require(worst < 1e-4, "gradient error " + fmt(worst) + " >= 1e-4");
}

// ---------------------------------------------------------------- criterion 7
// Blend weights must normalize everywhere, including far from every field,
// and a single receptive field must recover a linear map on its own.
void c7_lwpr_laws() {
    double worst_sum = 0.0;
    double worst_neg = 0.0;
    int queries = 0;
    for (int mrep = 0; mrep < 20; ++mrep) {
        SplitMix64 rng(derive_seed({0xacce9707ull, static_cast<std::uint64_t>(mrep)}));
        const int n = 20 + static_cast<int>(rng.below(30));
        const int d = 1 + static_cast<int>(rng.below(5));
        const int L = 1 + static_cast<int>(rng.below(3));
        Matrix X(n, d), Y(n, L);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-3.0, 3.0);
            for (int c = 0; c < L; ++c) Y(i, c) = rng.uniform(-2.0, 2.0);
        }
        ModelSpec spec;
        spec.family = Family::LWPR;
        spec.seed = derive_seed({23ull, static_cast<std::uint64_t>(mrep)});
        auto lw = std::dynamic_pointer_cast<const LwprModel>(fit_lwpr(X, Y, spec));
        require(lw != nullptr, "lwpr fit returned an unexpected model type");
        if (!lw) return;
        for (int q = 0; q < 50; ++q) {
            const double scale = (q % 5 == 4) ? 100.0 : 1.0;  // distant queries
            Vector xq(d);
            for (int j = 0; j < d; ++j) xq(j) = scale * rng.uniform(-3.0, 3.0);
            const Vector w = lw->blend_weights(xq);
            worst_sum = std::max(worst_sum, std::abs(w.sum() - 1.0));
            worst_neg = std::min(worst_neg, w.minCoeff());
            ++queries;
        }
    }
    g_note.push_back("largest |weight sum - 1| over " + std::to_string(queries) +
                     " queries: " + fmt(worst_sum));
    require(queries == 1000, "expected 1000 queries, ran " + std::to_string(queries));
    require(worst_sum <= 1e-12, "weight sums deviate by " + fmt(worst_sum));
    require(worst_neg >= 0.0, "a blend weight went negative");

    SplitMix64 rng(0xacce9717ull);
    const int n = 40, d = 4, L = 3;
    Matrix X(n, d), A(d, L);
    Vector b(L);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-0.05, 0.05);
    for (int j = 0; j < d; ++j)
        for (int c = 0; c < L; ++c) A(j, c) = rng.uniform(-2.0, 2.0);
    for (int c = 0; c < L; ++c) b(c) = rng.uniform(-1.0, 1.0);
    const Matrix Y = (X * A).rowwise() + b.transpose();

    ModelSpec spec;
    spec.family = Family::LWPR;
    spec.seed = 29;
    auto lw = std::dynamic_pointer_cast<const LwprModel>(fit_lwpr(X, Y, spec));
    require(lw != nullptr, "lwpr fit returned an unexpected model type");
    if (!lw) return;
    require(lw->centers.rows() == 1,
            "expected a single receptive field, got " + std::to_string(lw->centers.rows()));
    Matrix P(n, L);
    for (int i = 0; i < n; ++i) P.row(i) = lw->predict_std(X.row(i).transpose()).transpose();
    const MetricSet ms = compute_metrics(Y, P);
    g_note.push_back("single-field linear recovery train R2: " + fmt(ms.r2_channels.minCoeff()));
    require(ms.r2_channels.minCoeff() >= 99.9999,
            "linear recovery R2 " + fmt(ms.r2_channels.minCoeff()) + " < 99.9999");
}

// ---------------------------------------------------------------- criterion 8
// The tube dual solver against a dense reference solve of the same program:
//   min_z 1/2 z'Kz - y'z + eps*|z|_1   s.t.  sum(z) = 0, -C <= z_i <= C
// via FISTA, whose prox (soft-threshold + box + hyperplane) is separable once
// the hyperplane multiplier is pinned down by bisection.
Vector qp_prox(const Vector& v, double thresh, double C) {
    auto shifted_sum = [&](double nu) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double a = v(i) - nu;
            const double soft = std::copysign(std::max(std::abs(a) - thresh, 0.0), a);
            s += std::clamp(soft, -C, C);
        }
        return s;
    };
    double lo = v.minCoeff() - thresh - C - 1.0;
    double hi = v.maxCoeff() + thresh + C + 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (shifted_sum(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    const double nu = 0.5 * (lo + hi);
    Vector out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = v(i) - nu;
        const double soft = std::copysign(std::max(std::abs(a) - thresh, 0.0), a);
        out(i) = std::clamp(soft, -C, C);
    }
    return out;
}

double qp_objective(const Matrix& K, const Vector& y, double eps, const Vector& z) {
    return 0.5 * z.dot(K * z) - y.dot(z) + eps * z.cwiseAbs().sum();
}

struct QpSolution {
    Vector z;
    double bias = 0.0;
};

QpSolution dense_qp(const Matrix& K, const Vector& y, double C, double eps) {
    const Eigen::Index n = y.size();
    Eigen::SelfAdjointEigenSolver<Matrix> es(K);
    const double L = std::max(es.eigenvalues().maxCoeff(), 1e-8);
    Vector z = Vector::Zero(n), w = z;
    double tk = 1.0;
    double prev = qp_objective(K, y, eps, z);
    for (int it = 0; it < 20000; ++it) {
        const Vector grad = K * w - y;
        const Vector znew = qp_prox(w - grad / L, eps / L, C);
        const double tnew = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        w = znew + ((tk - 1.0) / tnew) * (znew - z);
        z = znew;
        tk = tnew;
        if (it % 50 == 49) {
            const double cur = qp_objective(K, y, eps, z);
            if (std::abs(prev - cur) < 1e-15 * (1.0 + std::abs(cur))) break;
            if (cur > prev) { w = z; tk = 1.0; }  // restart on ripple
            prev = cur;
        }
    }
    QpSolution out;
    out.z = z;
    const Vector f = K * z;
    const double btol = 1e-6 * C;
    double sum = 0.0;
    int count = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (z(i) > btol && z(i) < C - btol) { sum += y(i) - f(i) - eps; ++count; }
        if (z(i) < -btol && z(i) > -C + btol) { sum += y(i) - f(i) + eps; ++count; }
        if (std::abs(z(i)) <= btol) {
            lo = std::max(lo, y(i) - f(i) - eps);
            hi = std::min(hi, y(i) - f(i) + eps);
        }
        if (z(i) >= C - btol) hi = std::min(hi, y(i) - f(i) - eps);
        if (z(i) <= -C + btol) lo = std::max(lo, y(i) - f(i) + eps);
    }
    if (count > 0) out.bias = sum / count;
    else if (std::isfinite(lo) && std::isfinite(hi)) out.bias = 0.5 * (lo + hi);
    else out.bias = 0.0;
    return out;
}

void c8_svr_kkt() {
    double worst_box = 0.0, worst_kkt = 0.0, worst_pred = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        SplitMix64 rng(derive_seed({0xacce9708ull, static_cast<std::uint64_t>(rep)}));
        const int n = 15 + static_cast<int>(rng.below(26));
        Matrix X(n, 1);
        Vector y(n);
        for (int i = 0; i < n; ++i) {
            X(i, 0) = rng.uniform(-2.0, 2.0);
            y(i) = std::sin(2.0 * X(i, 0)) + 0.3 * X(i, 0) * X(i, 0) +
                   0.05 * rng.normal();
        }
        SvrParams hp;  // defaults; vary the box and the tube across problems
        if (rep % 3 == 1) hp.cost = 1.0;
        if (rep % 3 == 2) hp.epsilon = 0.1;

        CompositeKernelParams kp;
        kp.white_noise = 0.0;
        const Matrix K = kernel_matrix(X, kp);
        const SvrDual dual = detail::svr_smo(K, y, hp);

        for (Eigen::Index i = 0; i < n; ++i) {
            worst_box = std::max(worst_box, std::abs(dual.beta(i)) - hp.cost);
            worst_box = std::max(worst_box, -dual.alpha_p(i));
            worst_box = std::max(worst_box, dual.alpha_p(i) - hp.cost);
            worst_box = std::max(worst_box, -dual.alpha_m(i));
            worst_box = std::max(worst_box, dual.alpha_m(i) - hp.cost);
        }
        worst_kkt = std::max(worst_kkt, dual.kkt_residual);
        worst_kkt = std::max(
            worst_kkt, detail::svr_kkt_residual(K, y, dual.alpha_p, dual.alpha_m,
                                                dual.bias, hp.cost, hp.epsilon));

        const QpSolution ref = dense_qp(K, y, hp.cost, hp.epsilon);
        Matrix Q(n + 10, 1);
        Q.topRows(n) = X;
        for (int q = 0; q < 10; ++q) Q(n + q, 0) = rng.uniform(-2.2, 2.2);
        const Matrix Kq = cross_kernel(X, Q, kp);
        for (Eigen::Index q = 0; q < Q.rows(); ++q) {
            const double f_smo = dual.beta.dot(Kq.col(q)) + dual.bias;
            const double f_ref = ref.z.dot(Kq.col(q)) + ref.bias;
            worst_pred = std::max(worst_pred, std::abs(f_smo - f_ref));
        }
    }
    g_note.push_back("largest box overshoot: " + fmt(worst_box));
    g_note.push_back("largest kkt residual: " + fmt(worst_kkt));
    g_note.push_back("largest prediction gap to the dense solve: " + fmt(worst_pred));
    require(worst_box <= 1e-12, "dual coefficients leave the box by " + fmt(worst_box));
    require(worst_kkt < 1e-4, "kkt residual " + fmt(worst_kkt) + " >= 1e-4");
    require(worst_pred <= 1e-3, "prediction gap " + fmt(worst_pred) + " > 1e-3");
}

// ---------------------------------------------------------------- criterion 9
// Fold partitioning, scaler post-conditions, resampling endpoint
// preservation, and reconstruction of states from cumulative deltas.
void c9_pipeline_laws() {
    SplitMix64 rng(0xacce9709ull);

    bool folds_ok = true;
    for (int rep = 0; rep < 100 && folds_ok; ++rep) {
        const int k = 2 + static_cast<int>(rng.below(8));
        const int n = k + static_cast<int>(rng.below(200));
        const FoldPlan plan = make_folds(n, k, rng.next());
        folds_ok = folds_ok && static_cast<int>(plan.assignments.size()) == n;
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        for (int f = 0; f < k; ++f) {
            for (int r : fold_rows(plan, f, true)) {
                folds_ok = folds_ok && r >= 0 && r < n && !seen[static_cast<std::size_t>(r)];
                seen[static_cast<std::size_t>(r)] = 1;
                ++counts[static_cast<std::size_t>(f)];
            }
            folds_ok = folds_ok &&
                       fold_rows(plan, f, false).size() + fold_rows(plan, f, true).size() ==
                           static_cast<std::size_t>(n);
        }
        for (int r = 0; r < n; ++r) folds_ok = folds_ok && seen[static_cast<std::size_t>(r)];
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        folds_ok = folds_ok && *hi - *lo <= 1;
    }
    require(folds_ok, "fold plans violate the partition laws");

    double worst_mean = 0.0, worst_var = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(rng.below(100));
        const int d = 1 + static_cast<int>(rng.below(8));
        Matrix X(n, d);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-5.0, 5.0);
        if (rep % 7 == 0) X.col(0).setConstant(3.25);  // exercise the scale floor
        const Scaler s = fit_scaler(X);
        const Matrix Z = apply_scaler(s, X);
        for (int j = 0; j < d; ++j) {
            double mean = 0.0;
            for (int i = 0; i < n; ++i) mean += Z(i, j);
            mean /= n;
            worst_mean = std::max(worst_mean, std::abs(mean));
            double var = 0.0;
            for (int i = 0; i < n; ++i) var += (Z(i, j) - mean) * (Z(i, j) - mean);
            var /= n;
            if (s.scale(j) > kScaleFloor)
                worst_var = std::max(worst_var, std::abs(var - 1.0));
            else
                worst_var = std::max(worst_var, std::abs(var));  // constant column -> all zero
        }
    }
    g_note.push_back("largest standardized column |mean|: " + fmt(worst_mean) +
                     ", |variance - 1|: " + fmt(worst_var));
    require(worst_mean <= 1e-9, "standardized means deviate by " + fmt(worst_mean));
    require(worst_var <= 1e-9, "standardized variances deviate by " + fmt(worst_var));

    bool endpoints_ok = true;
    for (int rep = 0; rep < 100 && endpoints_ok; ++rep) {
        const int n = 2 + static_cast<int>(rng.below(120));
        const int target = 2 + static_cast<int>(rng.below(150));
        Vector series(n);
        for (int i = 0; i < n; ++i) series(i) = rng.uniform(-4.0, 4.0);
        const Vector out = resample_linear(series, target);
        endpoints_ok = endpoints_ok && out.size() == target &&
                       out(0) == series(0) && out(target - 1) == series(n - 1);
    }
    require(endpoints_ok, "resampling fails to preserve endpoints exactly");

    double worst_recon = 0.0;
    bool inputs_ok = true;
    for (int rep = 0; rep < 100; ++rep) {
        const int T = 11 + static_cast<int>(rng.below(90));
        Trial tr;
        tr.task = TaskLabel::H;
        tr.subject = "S1";
        tr.sample_rate = 100.0;
        tr.states.resize(T, 4);
        tr.robot_actions.resize(T, 2);
        tr.user_actions.resize(T, 4);
        for (int t = 0; t < T; ++t) {
            for (int j = 0; j < 4; ++j) tr.states(t, j) = rng.uniform(-2.0, 2.0);
            for (int j = 0; j < 2; ++j) tr.robot_actions(t, j) = rng.uniform(-1.0, 1.0);
            for (int j = 0; j < 4; ++j) tr.user_actions(t, j) = rng.uniform(-1.0, 1.0);
        }
        const TaskDataset ds = build_pairs(tr);
        inputs_ok = inputs_ok && ds.rows() == T - 1 && ds.inputs.cols() == 10;
        for (int t = 0; t < T - 1 && inputs_ok; ++t) {
            inputs_ok = inputs_ok &&
                        ds.inputs.row(t).head(4) == tr.states.row(t) &&
                        ds.inputs.row(t).segment(4, 2) == tr.robot_actions.row(t) &&
                        ds.inputs.row(t).tail(4) == tr.user_actions.row(t);
        }
        Vector acc = tr.states.row(0).transpose();
        for (int t = 0; t < T - 1; ++t) {
            acc += ds.targets.row(t).transpose();
            worst_recon = std::max(
                worst_recon,
                (acc - tr.states.row(t + 1).transpose()).cwiseAbs().maxCoeff());
        }
    }
    g_note.push_back("largest cumulative-delta reconstruction error: " + fmt(worst_recon));
    require(inputs_ok, "supervised inputs do not copy the trial rows exactly");
    require(worst_recon <= 1e-12,
            "cumulative deltas reconstruct states only to " + fmt(worst_recon));
}

// --------------------------------------------------------------- criterion 10
// Full noiseless benchmark at the default configuration: runtime, per-family
// diagonal score floor, and bit-identical summaries across a complete rerun.
void c10_end_to_end() {
    namespace fs = std::filesystem;
    RunConfig cfg;
    cfg.noise_scale = 0.0;
    const fs::path out = fs::temp_directory_path() / "exodyn_acceptance_run";
    fs::remove_all(out);
    cfg.output_dir = out.string();

    const auto t0 = std::chrono::steady_clock::now();
    cmd_generate(cfg);
    const nlohmann::ordered_json first = cmd_benchmark(cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    g_note.push_back("generate + benchmark wall time: " + fmt(seconds) + "s");
    require(seconds < 600.0, "benchmark took " + fmt(seconds) + "s, limit is 600s");

    std::map<Family, std::pair<double, int>> diag;
    for (const auto& rel : first.at("matrices")) {
        const CrossTaskMatrix m =
            read_matrix_csv((out / rel.get<std::string>()).string());
        for (std::size_t i = 0; i < m.labels.size(); ++i) {
            diag[m.family].first += m.cells[i][i].r2;
            diag[m.family].second += 1;
        }
    }
    for (Family f : cfg.families) {
        const auto it = diag.find(f);
        require(it != diag.end() && it->second.second == 18,
                std::string(to_string(f)) + ": expected 18 diagonal cells");
        if (it == diag.end() || it->second.second == 0) continue;
        const double mean = it->second.first / it->second.second;
        g_note.push_back(std::string(to_string(f)) +
                         " noiseless diagonal mean R2: " + fmt(mean));
        require(mean >= 90.0, std::string(to_string(f)) +
                                  " diagonal mean " + fmt(mean) + " < 90");
    }

    cmd_generate(cfg);
    const nlohmann::ordered_json second = cmd_benchmark(cfg);
    require(first.at("run_id") == second.at("run_id"),
            "run ids differ across identical reruns");
    require(first.at("determinism_hash") == second.at("determinism_hash"),
            "summary hashes differ across identical reruns: " +
                first.at("determinism_hash").get<std::string>() + " vs " +
                second.at("determinism_hash").get<std::string>());
    g_note.push_back("summary hash: " + first.at("determinism_hash").get<std::string>());
    fs::remove_all(out);
}

struct Criterion {
    int id;
    const char* label;
    double limit_seconds;  // 0 disables the outer wall-time bound
    void (*body)();
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "fixture ranking matches the reference order", 1.0, c1_fixture_ranking},
        {2, "metrics match brute-force oracles", 5.0, c2_metric_oracles},
        {3, "gpr posterior matches a dense solve", 10.0, c3_gpr_dense},
        {4, "knn matches exhaustive search", 5.0, c4_knn_exhaustive},
        {5, "xgboost split search matches exhaustive enumeration", 10.0, c5_xgb_splits},
        {6, "mlp gradients match finite differences", 10.0, c6_mlp_gradients},
        {7, "lwpr weights normalize and a single field recovers linear maps", 5.0,
         c7_lwpr_laws},
        {8, "svr duals satisfy box and kkt conditions and match a dense qp", 30.0,
         c8_svr_kkt},
        {9, "preprocessing laws hold on random instances", 5.0, c9_pipeline_laws},
        {10, "end-to-end benchmark discriminates and reruns bit-identically", 0.0,
         c10_end_to_end},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        g_fail.clear();
        g_note.clear();
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body();
        } catch (const std::exception& e) {
            require(false, std::string("unexpected exception: ") + e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (c.limit_seconds > 0.0 && seconds >= c.limit_seconds)
            g_fail.push_back("ran " + fmt(seconds) + "s, limit is " +
                             fmt(c.limit_seconds) + "s");
        std::printf("%s criterion %2d: %s (%.2fs)\n",
                    g_fail.empty() ? "PASS" : "FAIL", c.id, c.label, seconds);
        for (const std::string& line : g_note)
            std::printf("    %s\n", line.c_str());
        for (const std::string& line : g_fail)
            std::printf("    failure: %s\n", line.c_str());
        if (!g_fail.empty()) ++failures;
        std::fflush(stdout);
    }
    if (failures > 0)
        std::printf("%d of 10 criteria failed\n", failures);
    else
        std::printf("all 10 criteria passed\n");
    return failures == 0 ? 0 : 1;
}
