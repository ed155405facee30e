#pragma once

#include <vector>

#include "exodyn/model.hpp"

namespace exodyn {

// One epsilon-tube dual solve. alpha_p/alpha_m are the positive/negative
// slack multipliers, beta their difference entering Eq.-style predictions.
struct SvrDual {
    Vector alpha_p;
    Vector alpha_m;
    Vector beta;
    double bias = 0.0;
    double kkt_residual = 0.0;
    long iterations = 0;
};

namespace detail {

// KKT violation of a candidate (beta, bias) against the tube conditions,
// measured with the same Gram matrix the dual was solved on.
inline double svr_kkt_residual(const Matrix& K, const Vector& y, const Vector& ap,
                               const Vector& am, double bias, double C, double eps) {
    const double btol = 1e-8 * C;
    const Vector r = y - (K * (ap - am) + Vector::Constant(y.size(), bias));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double v = 0.0;
        if (ap(i) <= btol) v = std::max(v, r(i) - eps);
        else if (ap(i) >= C - btol) v = std::max(v, eps - r(i));
        else v = std::max(v, std::abs(r(i) - eps));
        if (am(i) <= btol) v = std::max(v, -r(i) - eps);
        else if (am(i) >= C - btol) v = std::max(v, r(i) + eps);
        else v = std::max(v, std::abs(r(i) + eps));
        worst = std::max(worst, v);
    }
    return worst;
}

// Sequential minimal optimization over the 2n stacked variables with
// second-order working-set selection.
inline SvrDual svr_smo(const Matrix& K, const Vector& y, const SvrParams& hp) {
    const Eigen::Index n = y.size();
    const double C = hp.cost, eps = hp.epsilon;
    Vector alpha = Vector::Zero(2 * n);  // [alpha_p; alpha_m]
    Vector G(2 * n);                     // gradient of the dual objective
    G.head(n) = Vector::Constant(n, eps) - y;
    G.tail(n) = Vector::Constant(n, eps) + y;
    auto sign = [n](Eigen::Index a) { return a < n ? 1.0 : -1.0; };
    auto row = [n](Eigen::Index a) { return a < n ? a : a - n; };

    long it = 0;
    double gap = 0.0;
    for (; it < hp.max_iter; ++it) {
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index a = 0; a < 2 * n; ++a) {
            const double s = sign(a);
            const double v = -s * G(a);
            const bool in_up = (s > 0 && alpha(a) < C) || (s < 0 && alpha(a) > 0);
            const bool in_low = (s > 0 && alpha(a) > 0) || (s < 0 && alpha(a) < C);
            if (in_up && v > m_up) { m_up = v; i = a; }
            if (in_low && v < m_low) m_low = v;
        }
        gap = m_up - m_low;
        if (gap < hp.tol) break;

        // second-order choice of the partner: maximize the guaranteed decrease
        const double si = sign(i);
        const Eigen::Index ri = row(i);
        Eigen::Index j = -1;
        double best_gain = -1.0;
        for (Eigen::Index a = 0; a < 2 * n; ++a) {
            const double s = sign(a);
            const bool in_low = (s > 0 && alpha(a) > 0) || (s < 0 && alpha(a) < C);
            if (!in_low) continue;
            const double v = -s * G(a);
            const double diff = m_up - v;
            if (diff <= 0) continue;
            double eta = K(ri, ri) + K(row(a), row(a)) - 2.0 * K(ri, row(a));
            if (eta <= 1e-12) eta = 1e-12;
            const double gain = diff * diff / eta;
            if (gain > best_gain) { best_gain = gain; j = a; }
        }
        if (j < 0) break;

        const double sj = sign(j);
        const Eigen::Index rj = row(j);
        double eta = K(ri, ri) + K(rj, rj) - 2.0 * K(ri, rj);
        if (eta <= 1e-12) eta = 1e-12;
        // direction: delta alpha_j = -si*sj * t
        double t = -(G(i) - si * sj * G(j)) / eta;
        double lo = -alpha(i), hi = C - alpha(i);
        if (si * sj > 0) { lo = std::max(lo, alpha(j) - C); hi = std::min(hi, alpha(j)); }
        else { lo = std::max(lo, -alpha(j)); hi = std::min(hi, C - alpha(j)); }
        t = std::min(std::max(t, lo), hi);
        if (t == 0.0) break;
        const double di = t, dj = -si * sj * t;
        alpha(i) += di;
        alpha(j) += dj;
        const Vector u = (si * di) * K.col(ri) + (sj * dj) * K.col(rj);
        G.head(n) += u;
        G.tail(n) -= u;
    }
    if (gap >= hp.tol && it >= hp.max_iter)
        throw NonConvergence("SVR SMO stopped at gap " + std::to_string(gap) +
                             " after " + std::to_string(it) + " iterations");

    SvrDual out;
    out.alpha_p = alpha.head(n);
    out.alpha_m = alpha.tail(n);
    out.beta = out.alpha_p - out.alpha_m;
    out.iterations = it;

    // bias from the KKT interval of the equality multiplier
    const Vector f = K * out.beta;
    const double btol = 1e-8 * C;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double interior_sum = 0.0;
    int interior_count = 0;
    for (Eigen::Index q = 0; q < n; ++q) {
        const double up = f(q) - y(q) + eps;   // multiplier value pinned by alpha_p
        const double dn = f(q) - y(q) - eps;   // pinned by alpha_m
        if (out.alpha_p(q) > btol && out.alpha_p(q) < C - btol) { interior_sum += up; ++interior_count; }
        if (out.alpha_m(q) > btol && out.alpha_m(q) < C - btol) { interior_sum += dn; ++interior_count; }
        if (out.alpha_p(q) >= C - btol) lo = std::max(lo, up);
        if (out.alpha_p(q) <= btol) hi = std::min(hi, up);
        if (out.alpha_m(q) <= btol) lo = std::max(lo, dn);
        if (out.alpha_m(q) >= C - btol) hi = std::min(hi, dn);
    }
    double mult;
    if (interior_count > 0) mult = interior_sum / interior_count;
    else if (std::isfinite(lo) && std::isfinite(hi)) mult = 0.5 * (lo + hi);
    else if (std::isfinite(lo)) mult = lo;
    else if (std::isfinite(hi)) mult = hi;
    else mult = 0.0;
    out.bias = -mult;
    out.kkt_residual = svr_kkt_residual(K, y, out.alpha_p, out.alpha_m, out.bias, C, eps);
    return out;
}

}  // namespace detail

class SvrModel final : public FamilyModel {
  public:
    Matrix X;        // standardized training inputs
    Matrix beta;     // n x L dual coefficient differences, in tube units
    Vector bias;     // per channel, in tube units
    Vector y_center;  // per-channel target mean
    Vector y_scale;   // per-channel target deviation the tube was solved in
    CompositeKernelParams kernel;

    Family family() const override { return Family::SVR; }
    int output_dim() const override { return static_cast<int>(beta.cols()); }

    Vector predict_std(const Vector& xs) const override {
        Vector kq(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            kq(i) = composite_kernel(X.row(i).transpose(), xs, kernel, false);
        const Vector raw = beta.transpose() * kq + bias;
        return y_center + y_scale.cwiseProduct(raw);
    }

    Matrix predict_std_batch(const Matrix& Xs) const override {
        const Matrix Kq = cross_kernel(X, Xs, kernel);  // n x q
        Matrix out = Kq.transpose() * beta;
        out.rowwise() += bias.transpose();
        out.array().rowwise() *= y_scale.transpose().array();
        out.rowwise() += y_center.transpose();
        return out;
    }

    json payload_json() const override {
        return json{{"X", matrix_json(X)}, {"beta", matrix_json(beta)},
                    {"bias", vector_json(bias)}, {"y_center", vector_json(y_center)},
                    {"y_scale", vector_json(y_scale)}};
    }
};

// The tube is solved on per-channel standardized targets so one epsilon means
// the same relative band for every output channel regardless of its units.
inline std::shared_ptr<FamilyModel> fit_svr(const Matrix& Xs, const Matrix& Y,
                                            const ModelSpec& spec) {
    const auto& hp = spec.hp.svr;
    auto m = std::make_shared<SvrModel>();
    m->X = Xs;
    m->kernel = hp.kernel;
    m->beta.resize(Xs.rows(), Y.cols());
    m->bias.resize(Y.cols());
    m->y_center.resize(Y.cols());
    m->y_scale.resize(Y.cols());
    // The white term models observation noise; it belongs to the GPR prior,
    // not the tube constraints, so the dual Gram drops it. Keeping it would
    // smooth predictions by Lambda^2 * beta_i and break the tube semantics.
    CompositeKernelParams gram = hp.kernel;
    gram.white_noise = 0.0;
    const Matrix K = kernel_matrix(Xs, gram);
    const double n = static_cast<double>(Y.rows());
    for (Eigen::Index c = 0; c < Y.cols(); ++c) {
        const double mu = Y.col(c).mean();
        const double sd = std::max(
            std::sqrt((Y.col(c).array() - mu).square().sum() / n), kScaleFloor);
        const Vector ys = (Y.col(c).array() - mu) / sd;
        SvrDual dual = detail::svr_smo(K, ys, hp);
        m->beta.col(c) = dual.beta;
        m->bias(c) = dual.bias;
        m->y_center(c) = mu;
        m->y_scale(c) = sd;
    }
    return m;
}

}  // namespace exodyn
