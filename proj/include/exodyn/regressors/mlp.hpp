#pragma once

#include <deque>
#include <vector>

#include "exodyn/model.hpp"
#include "exodyn/rng.hpp"

namespace exodyn {

// One hidden ReLU layer trained on mean squared error. Minimizing SSE is
// identical to maximizing R-squared for fixed targets, so the R2 objective
// is realized as MSE. Optimized with limited-memory BFGS plus backtracking.
class MlpModel final : public FamilyModel {
  public:
    struct Net {
        Matrix W1;  // h x d
        Vector b1;  // h
        Vector W2;  // h
        double b2 = 0.0;
    };
    std::vector<Net> nets;  // one per output channel

    Family family() const override { return Family::MLP; }
    int output_dim() const override { return static_cast<int>(nets.size()); }

    Vector predict_std(const Vector& xs) const override {
        Vector out(output_dim());
        for (std::size_t c = 0; c < nets.size(); ++c) {
            const Net& nn = nets[c];
            const Vector a = (nn.W1 * xs + nn.b1).cwiseMax(0.0);
            out(static_cast<Eigen::Index>(c)) = nn.W2.dot(a) + nn.b2;
        }
        return out;
    }

    Matrix predict_std_batch(const Matrix& Xs) const override {
        Matrix out(Xs.rows(), output_dim());
        for (std::size_t c = 0; c < nets.size(); ++c) {
            const Net& nn = nets[c];
            Matrix A = (Xs * nn.W1.transpose()).rowwise() + nn.b1.transpose();
            A = A.cwiseMax(0.0);
            out.col(static_cast<Eigen::Index>(c)) =
                (A * nn.W2).array() + nn.b2;
        }
        return out;
    }

    json payload_json() const override {
        json chans = json::array();
        for (const Net& nn : nets)
            chans.push_back(json{{"W1", matrix_json(nn.W1)}, {"b1", vector_json(nn.b1)},
                                 {"W2", vector_json(nn.W2)}, {"b2", nn.b2}});
        return json{{"channels", std::move(chans)}};
    }
};

namespace detail {

struct MlpShape {
    int d = 0, h = 0;
    int size() const { return h * d + h + h + 1; }
};

inline MlpModel::Net unpack_net(const Vector& theta, const MlpShape& s) {
    MlpModel::Net nn;
    nn.W1 = Eigen::Map<const Matrix>(theta.data(), s.h, s.d);
    nn.b1 = theta.segment(s.h * s.d, s.h);
    nn.W2 = theta.segment(s.h * s.d + s.h, s.h);
    nn.b2 = theta(s.h * s.d + 2 * s.h);
    return nn;
}

// mean squared error and its gradient for one scalar-output net
inline double mlp_loss_grad(const Vector& theta, const MlpShape& s, const Matrix& X,
                            const Vector& y, Vector* grad) {
    const auto nn = unpack_net(theta, s);
    const double n = static_cast<double>(X.rows());
    Matrix Z = (X * nn.W1.transpose()).rowwise() + nn.b1.transpose();
    Matrix A = Z.cwiseMax(0.0);
    Vector out = (A * nn.W2).array() + nn.b2;
    Vector err = out - y;
    const double loss = err.squaredNorm() / n;
    if (grad) {
        Vector dout = 2.0 * err / n;
        Vector gW2 = A.transpose() * dout;
        const double gb2 = dout.sum();
        Matrix dZ = (dout * nn.W2.transpose()).array() * (Z.array() > 0.0).cast<double>();
        Matrix gW1 = dZ.transpose() * X;
        Vector gb1 = dZ.colwise().sum();
        grad->resize(s.size());
        Eigen::Map<Matrix>(grad->data(), s.h, s.d) = gW1;
        grad->segment(s.h * s.d, s.h) = gb1;
        grad->segment(s.h * s.d + s.h, s.h) = gW2;
        (*grad)(s.h * s.d + 2 * s.h) = gb2;
    }
    return loss;
}

struct LbfgsResult {
    Vector theta;
    bool converged = false;
    int iterations = 0;
    double grad_norm = 0.0;
};

// two-loop recursion L-BFGS with Armijo backtracking; keeps the best iterate
template <typename Fn>
LbfgsResult lbfgs_minimize(Vector theta, Fn&& fg, int max_iter, double grad_tol,
                           int history) {
    LbfgsResult res;
    Vector g;
    double f = fg(theta, &g);
    Vector best_theta = theta;
    double best_f = f;
    std::deque<Vector> s_hist, y_hist;
    std::deque<double> rho_hist;

    int it = 0;
    for (; it < max_iter; ++it) {
        res.grad_norm = g.cwiseAbs().maxCoeff();
        if (res.grad_norm < grad_tol) { res.converged = true; break; }

        Vector q = g;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[static_cast<std::size_t>(i)] =
                rho_hist[static_cast<std::size_t>(i)] *
                s_hist[static_cast<std::size_t>(i)].dot(q);
            q -= alpha[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)];
        }
        if (!s_hist.empty()) {
            const Vector& sl = s_hist.back();
            const Vector& yl = y_hist.back();
            q *= sl.dot(yl) / yl.dot(yl);
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(q);
            q += (alpha[i] - beta) * s_hist[i];
        }
        Vector dir = -q;
        double dg = dir.dot(g);
        if (dg >= 0.0) { dir = -g; dg = dir.dot(g); }

        double step = 1.0;
        double f_new = f;
        Vector theta_new, g_new;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            theta_new = theta + step * dir;
            f_new = fg(theta_new, &g_new);
            if (f_new <= f + 1e-4 * step * dg) { accepted = true; break; }
            step *= 0.5;
        }
        if (!accepted) break;

        const Vector s = theta_new - theta;
        const Vector yv = g_new - g;
        const double sy = s.dot(yv);
        if (sy > 1e-10) {
            s_hist.push_back(s);
            y_hist.push_back(yv);
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        theta = std::move(theta_new);
        g = std::move(g_new);
        f = f_new;
        if (f < best_f) { best_f = f; best_theta = theta; }
    }
    if (f < best_f) { best_f = f; best_theta = theta; }
    res.theta = best_theta;
    res.iterations = it;
    return res;
}

}  // namespace detail

struct MlpFitReport {
    bool converged = true;
    std::string note;
};

inline std::shared_ptr<FamilyModel> fit_mlp(const Matrix& Xs, const Matrix& Y,
                                            const ModelSpec& spec,
                                            MlpFitReport* report = nullptr) {
    const auto& hp = spec.hp.mlp;
    detail::MlpShape shape{static_cast<int>(Xs.cols()), hp.hidden_width};
    auto m = std::make_shared<MlpModel>();
    if (report) { report->converged = true; report->note.clear(); }

    for (Eigen::Index c = 0; c < Y.cols(); ++c) {
        SplitMix64 rng(derive_seed({spec.seed, 0x6d6c70ull, static_cast<std::uint64_t>(c)}));
        Vector theta = Vector::Zero(shape.size());
        const double a1 = std::sqrt(6.0 / static_cast<double>(shape.d + shape.h));
        for (int i = 0; i < shape.h * shape.d; ++i) theta(i) = rng.uniform(-a1, a1);
        const double a2 = std::sqrt(6.0 / static_cast<double>(shape.h + 1));
        for (int i = 0; i < shape.h; ++i)
            theta(shape.h * shape.d + shape.h + i) = rng.uniform(-a2, a2);

        const Vector y = Y.col(c);
        auto fg = [&](const Vector& t, Vector* g) {
            return detail::mlp_loss_grad(t, shape, Xs, y, g);
        };
        auto res = detail::lbfgs_minimize(std::move(theta), fg, hp.max_iter,
                                          hp.grad_tol, hp.history);
        if (!res.converged && report) {
            report->converged = false;
            report->note += "channel " + std::to_string(c) + " stopped at grad norm " +
                            std::to_string(res.grad_norm) + " after " +
                            std::to_string(res.iterations) + " iterations; ";
        }
        m->nets.push_back(detail::unpack_net(res.theta, shape));
    }
    return m;
}

}  // namespace exodyn
