#pragma once

#include "exodyn/train.hpp"

namespace exodyn {

inline constexpr int kModelSchemaVersion = 1;

inline json hyperparams_json(const Hyperparams& hp) {
    return json{
        {"lwpr", {{"field_radius", hp.lwpr.field_radius},
                  {"gen_threshold", hp.lwpr.gen_threshold},
                  {"ridge", hp.lwpr.ridge}}},
        {"knn", {{"k", hp.knn.k},
                 {"weight_power", hp.knn.weight_power},
                 {"cv_folds", hp.knn.cv_folds},
                 {"k_cap", hp.knn.k_cap}}},
        {"svr", {{"cost", hp.svr.cost},
                 {"epsilon", hp.svr.epsilon},
                 {"tol", hp.svr.tol},
                 {"max_iter", hp.svr.max_iter},
                 {"kernel", {{"constant_value", hp.svr.kernel.constant_value},
                             {"matern_length_scale", hp.svr.kernel.matern_length_scale},
                             {"white_noise", hp.svr.kernel.white_noise}}}}},
        {"xgb", {{"rounds", hp.xgb.rounds},
                 {"learning_rate", hp.xgb.learning_rate},
                 {"max_depth", hp.xgb.max_depth},
                 {"reg_lambda", hp.xgb.reg_lambda},
                 {"gamma", hp.xgb.gamma}}},
        {"mlp", {{"hidden_width", hp.mlp.hidden_width},
                 {"max_iter", hp.mlp.max_iter},
                 {"grad_tol", hp.mlp.grad_tol},
                 {"history", hp.mlp.history}}},
        {"gpr", {{"kernel", {{"constant_value", hp.gpr.kernel.constant_value},
                             {"matern_length_scale", hp.gpr.kernel.matern_length_scale},
                             {"white_noise", hp.gpr.kernel.white_noise}}},
                 {"max_rows", hp.gpr.max_rows},
                 {"jitter_start", hp.gpr.jitter_start},
                 {"jitter_max", hp.gpr.jitter_max}}}};
}

inline CompositeKernelParams kernel_from_json(const json& j) {
    CompositeKernelParams k;
    k.constant_value = j.at("constant_value").get<double>();
    k.matern_length_scale = j.at("matern_length_scale").get<double>();
    k.white_noise = j.at("white_noise").get<double>();
    return k;
}

inline Hyperparams hyperparams_from_json(const json& j) {
    Hyperparams hp;
    const auto& l = j.at("lwpr");
    hp.lwpr.field_radius = l.at("field_radius").get<double>();
    hp.lwpr.gen_threshold = l.at("gen_threshold").get<double>();
    hp.lwpr.ridge = l.at("ridge").get<double>();
    const auto& k = j.at("knn");
    hp.knn.k = k.at("k").get<int>();
    hp.knn.weight_power = k.at("weight_power").get<double>();
    hp.knn.cv_folds = k.at("cv_folds").get<int>();
    hp.knn.k_cap = k.at("k_cap").get<int>();
    const auto& s = j.at("svr");
    hp.svr.cost = s.at("cost").get<double>();
    hp.svr.epsilon = s.at("epsilon").get<double>();
    hp.svr.tol = s.at("tol").get<double>();
    hp.svr.max_iter = s.at("max_iter").get<long>();
    hp.svr.kernel = kernel_from_json(s.at("kernel"));
    const auto& x = j.at("xgb");
    hp.xgb.rounds = x.at("rounds").get<int>();
    hp.xgb.learning_rate = x.at("learning_rate").get<double>();
    hp.xgb.max_depth = x.at("max_depth").get<int>();
    hp.xgb.reg_lambda = x.at("reg_lambda").get<double>();
    hp.xgb.gamma = x.at("gamma").get<double>();
    const auto& m = j.at("mlp");
    hp.mlp.hidden_width = m.at("hidden_width").get<int>();
    hp.mlp.max_iter = m.at("max_iter").get<int>();
    hp.mlp.grad_tol = m.at("grad_tol").get<double>();
    hp.mlp.history = m.at("history").get<int>();
    const auto& g = j.at("gpr");
    hp.gpr.kernel = kernel_from_json(g.at("kernel"));
    hp.gpr.max_rows = g.at("max_rows").get<int>();
    hp.gpr.jitter_start = g.at("jitter_start").get<double>();
    hp.gpr.jitter_max = g.at("jitter_max").get<double>();
    return hp;
}

inline json save_model(const TrainedModel& tm) {
    return json{{"schema_version", kModelSchemaVersion},
                {"family", to_string(tm.spec.family)},
                {"seed", tm.spec.seed},
                {"hyperparams", hyperparams_json(tm.spec.hp)},
                {"scaler", {{"mean", vector_json(tm.scaler.mean)},
                            {"scale", vector_json(tm.scaler.scale)}}},
                {"fit_time", tm.fit_time},
                {"converged", tm.converged},
                {"note", tm.convergence_note},
                {"payload", tm.model->payload_json()}};
}

inline TrainedModel load_model(const json& j) {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
        throw SchemaError("unsupported model schema version");
    TrainedModel tm;
    tm.spec.family = parse_family(j.at("family").get<std::string>());
    tm.spec.seed = j.at("seed").get<std::uint64_t>();
    tm.spec.hp = hyperparams_from_json(j.at("hyperparams"));
    tm.scaler.mean = json_vector(j.at("scaler").at("mean"));
    tm.scaler.scale = json_vector(j.at("scaler").at("scale"));
    tm.fit_time = j.at("fit_time").get<double>();
    tm.converged = j.at("converged").get<bool>();
    tm.convergence_note = j.at("note").get<std::string>();

    const json& p = j.at("payload");
    switch (tm.spec.family) {
        case Family::LWPR: {
            auto m = std::make_shared<LwprModel>();
            m->centers = json_matrix(p.at("centers"));
            for (const auto& th : p.at("thetas")) m->thetas.push_back(json_matrix(th));
            m->radius = p.at("radius").get<double>();
            tm.model = m;
            break;
        }
        case Family::KNN: {
            auto m = std::make_shared<KnnModel>();
            m->X = json_matrix(p.at("X"));
            m->Y = json_matrix(p.at("Y"));
            m->k = p.at("k").get<int>();
            m->weight_power = p.at("weight_power").get<double>();
            tm.model = m;
            break;
        }
        case Family::SVR: {
            auto m = std::make_shared<SvrModel>();
            m->X = json_matrix(p.at("X"));
            m->beta = json_matrix(p.at("beta"));
            m->bias = json_vector(p.at("bias"));
            m->y_center = json_vector(p.at("y_center"));
            m->y_scale = json_vector(p.at("y_scale"));
            m->kernel = tm.spec.hp.svr.kernel;
            tm.model = m;
            break;
        }
        case Family::XGBOOST: {
            auto m = std::make_shared<XgbModel>();
            m->learning_rate = p.at("learning_rate").get<double>();
            for (const auto& jtrees : p.at("channels")) {
                std::vector<Tree> trees;
                for (const auto& jnodes : jtrees) {
                    Tree t;
                    for (const auto& nd : jnodes) {
                        TreeNode node;
                        node.feature = nd[0].get<int>();
                        node.threshold = nd[1].get<double>();
                        node.left = nd[2].get<int>();
                        node.right = nd[3].get<int>();
                        node.value = nd[4].get<double>();
                        t.nodes.push_back(node);
                    }
                    trees.push_back(std::move(t));
                }
                m->channels.push_back(std::move(trees));
            }
            tm.model = m;
            break;
        }
        case Family::MLP: {
            auto m = std::make_shared<MlpModel>();
            for (const auto& ch : p.at("channels")) {
                MlpModel::Net nn;
                nn.W1 = json_matrix(ch.at("W1"));
                nn.b1 = json_vector(ch.at("b1"));
                nn.W2 = json_vector(ch.at("W2"));
                nn.b2 = ch.at("b2").get<double>();
                m->nets.push_back(std::move(nn));
            }
            tm.model = m;
            break;
        }
        case Family::GPR: {
            auto m = std::make_shared<GprModel>();
            m->X = json_matrix(p.at("X"));
            m->alpha = json_matrix(p.at("alpha"));
            m->jitter = p.at("jitter").get<double>();
            m->kernel = tm.spec.hp.gpr.kernel;
            m->factorize();
            tm.model = m;
            break;
        }
    }
    return tm;
}

}  // namespace exodyn
