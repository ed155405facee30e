#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace exodyn;

namespace {

ModelSpec quick_spec(Family f, std::uint64_t seed = 11) {
    ModelSpec s;
    s.family = f;
    s.seed = seed;
    s.hp.mlp.hidden_width = 8;
    s.hp.mlp.max_iter = 30;
    s.hp.xgb.rounds = 20;
    return s;
}

}  // namespace

TEST_CASE("train_model dispatches every family") {
    const TaskDataset ds = testutil::smooth_dataset(71, 60, 0.02);
    for (Family f : kAllFamilies) {
        const TrainedModel tm = train_model(ds, quick_spec(f));
        CHECK(tm.model->family() == f);
        CHECK(tm.model->output_dim() == 4);
        CHECK(tm.fit_time >= 0.0);
        const Vector pred = tm.predict(ds.inputs.row(0).transpose());
        CHECK(pred.size() == 4);
        CHECK(pred.allFinite());
        const Matrix batch = tm.predict_batch(ds.inputs);
        CHECK((batch.row(0).transpose() - pred).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("train_model validates its inputs") {
    TaskDataset empty;
    empty.inputs.resize(0, 10);
    empty.targets.resize(0, 4);
    CHECK_THROWS_AS(train_model(empty, quick_spec(Family::KNN)), EmptyInput);

    TaskDataset skew = testutil::smooth_dataset(72, 20, 0.0);
    skew.targets = skew.targets.topRows(19).eval();
    CHECK_THROWS_AS(train_model(skew, quick_spec(Family::KNN)), DimensionMismatch);

    TaskDataset bad = testutil::smooth_dataset(73, 20, 0.0);
    bad.inputs(3, 3) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(train_model(bad, quick_spec(Family::KNN)), NonFiniteValue);
}

TEST_CASE("retraining with the same seed reproduces predictions bit-exactly") {
    const TaskDataset ds = testutil::smooth_dataset(74, 70, 0.05);
    SplitMix64 rng(75);
    const Matrix probes = testutil::random_matrix(rng, 15, 10, -1.5, 1.5);
    for (Family f : kAllFamilies) {
        ModelSpec s = quick_spec(f, 123);
        if (f == Family::KNN) s.hp.knn.k = 0;  // exercise the seeded inner CV
        const TrainedModel a = train_model(ds, s);
        const TrainedModel b = train_model(ds, s);
        const Matrix pa = a.predict_batch(probes);
        const Matrix pb = b.predict_batch(probes);
        INFO("family " << to_string(f));
        CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("save and load round-trip preserves predictions bit-exactly") {
    const TaskDataset ds = testutil::smooth_dataset(76, 60, 0.05);
    SplitMix64 rng(77);
    const Matrix probes = testutil::random_matrix(rng, 20, 10, -2.0, 2.0);
    for (Family f : kAllFamilies) {
        const TrainedModel tm = train_model(ds, quick_spec(f));
        const std::string text = save_model(tm).dump();
        const TrainedModel back = load_model(json::parse(text));
        CHECK(back.spec.family == f);
        CHECK(back.spec.seed == tm.spec.seed);
        CHECK(back.fit_time == tm.fit_time);
        const Matrix pa = tm.predict_batch(probes);
        const Matrix pb = back.predict_batch(probes);
        INFO("family " << to_string(f));
        CHECK((pa - pb).cwiseAbs().maxCoeff() == 0.0);
        if (f == Family::GPR) {
            const Vector va = tm.predict_variance(probes.row(0).transpose());
            const Vector vb = back.predict_variance(probes.row(0).transpose());
            CHECK((va - vb).cwiseAbs().maxCoeff() == 0.0);
        }
    }
}

TEST_CASE("load_model rejects an unknown schema version") {
    const TaskDataset ds = testutil::smooth_dataset(78, 40, 0.0);
    json j = save_model(train_model(ds, quick_spec(Family::KNN)));
    j["schema_version"] = 999;
    CHECK_THROWS_AS(load_model(j), SchemaError);
}

TEST_CASE("convergence report survives the round-trip") {
    const TaskDataset ds = testutil::smooth_dataset(79, 50, 0.0);
    ModelSpec s = quick_spec(Family::MLP);
    s.hp.mlp.max_iter = 1;
    const TrainedModel tm = train_model(ds, s);
    REQUIRE_FALSE(tm.converged);
    const TrainedModel back = load_model(save_model(tm));
    CHECK_FALSE(back.converged);
    CHECK(back.convergence_note == tm.convergence_note);
}

TEST_CASE("predict rejects wrong query width and variance is GPR-only") {
    const TaskDataset ds = testutil::smooth_dataset(80, 40, 0.0);
    for (Family f : kAllFamilies) {
        const TrainedModel tm = train_model(ds, quick_spec(f));
        CHECK_THROWS_AS(tm.predict(Vector::Zero(9)), DimensionMismatch);
        if (f == Family::GPR) {
            CHECK_NOTHROW(tm.predict_variance(Vector::Zero(10)));
        } else {
            CHECK_THROWS_AS(tm.predict_variance(Vector::Zero(10)),
                            UnsupportedOperation);
        }
    }
}

TEST_CASE("hyperparameters round-trip through json") {
    Hyperparams hp;
    hp.lwpr.field_radius = 2.5;
    hp.knn.k = 7;
    hp.svr.cost = 3.0;
    hp.svr.kernel.matern_length_scale = 2.0;
    hp.xgb.gamma = 0.4;
    hp.mlp.hidden_width = 12;
    hp.gpr.kernel.white_noise = 0.5;
    const Hyperparams back = hyperparams_from_json(hyperparams_json(hp));
    CHECK(back.lwpr.field_radius == 2.5);
    CHECK(back.knn.k == 7);
    CHECK(back.svr.cost == 3.0);
    CHECK(back.svr.kernel.matern_length_scale == 2.0);
    CHECK(back.xgb.gamma == 0.4);
    CHECK(back.mlp.hidden_width == 12);
    CHECK(back.gpr.kernel.white_noise == 0.5);
}

TEST_CASE("model spec validation rejects bad hyperparameters") {
    ModelSpec s = quick_spec(Family::KNN);
    s.hp.knn.k = -1;
    CHECK_THROWS(s.validate());
    s = quick_spec(Family::SVR);
    s.hp.svr.epsilon = 0.0;
    CHECK_THROWS(s.validate());
    s = quick_spec(Family::XGBOOST);
    s.hp.xgb.learning_rate = 0.0;
    CHECK_THROWS(s.validate());
    s = quick_spec(Family::GPR);
    s.hp.gpr.kernel.matern_length_scale = 0.0;
    CHECK_THROWS(s.validate());
}
