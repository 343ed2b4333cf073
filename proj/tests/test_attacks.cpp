#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fedlab/attacks.hpp"
#include "fedlab/errors.hpp"
#include "fedlab/rng.hpp"

using namespace fedlab;
using namespace fedlab::attacks;
using fedlab::datakit::BackdoorKind;
using fedlab::datakit::BackdoorSpec;
using fedlab::datakit::Shard;

namespace {

ParameterVector pv(std::initializer_list<double> vals) {
    return ParameterVector(std::vector<double>(vals));
}

ParameterVector random_pv(std::size_t dim, std::mt19937_64& gen) {
    std::normal_distribution<double> n(0.0, 1.0);
    ParameterVector v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = n(gen);
    return v;
}

}  // namespace

TEST_CASE("scale_update: linear arithmetic") {
    CHECK(scale_update(pv({0, 0}), pv({1, 2}), 3.0).values == std::vector<double>{3.0, 6.0});
    const auto local = pv({0.5, -1.5, 2.0});
    CHECK(scale_update(pv({1, 1, 1}), local, 1.0).values == local.values);
    CHECK_THROWS_AS(scale_update(pv({1, 2}), pv({1, 2, 3}), 2.0), StructuralError);

    // N=100, K=10 gives the conventional factor 10.
    const double factor = 100.0 / 10.0;
    const auto out = scale_update(pv({1, 1}), pv({2, 1}), factor);
    CHECK(out.values == std::vector<double>{11.0, 1.0});
}

TEST_CASE("project_l2_ball: radial projection") {
    const auto global = pv({1, 1, 1});
    const auto far = pv({1, 1, 6});  // distance 5
    const auto projected = project_l2_ball(global, far, 2.0);
    CHECK(l2_norm(projected - global) == doctest::Approx(2.0));
    // Direction preserved.
    CHECK(projected[0] == doctest::Approx(1.0));
    CHECK(projected[1] == doctest::Approx(1.0));
    CHECK(projected[2] == doctest::Approx(3.0));

    const auto near = pv({1, 1, 1.5});
    CHECK(project_l2_ball(global, near, 2.0).values == near.values);
    CHECK(project_l2_ball(global, global, 2.0).values == global.values);
}

TEST_CASE("project_l2_ball: idempotence is exact and contraction holds") {
    auto gen = rng::engine(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto global = random_pv(12, gen);
        const auto candidate = random_pv(12, gen);
        const double radius = 0.1 + 0.5 * static_cast<double>(trial % 7);
        const auto once = project_l2_ball(global, candidate, radius);
        const auto twice = project_l2_ball(global, once, radius);
        CHECK(once.values == twice.values);

        const double in_norm = l2_norm(candidate - global);
        const double out_norm = l2_norm(once - global);
        CHECK(out_norm <= std::min(in_norm, radius) * (1.0 + 1e-9));
    }
}

TEST_CASE("dba_trigger_parts: decomposition covers the trigger") {
    BackdoorSpec spec;
    spec.kind = BackdoorKind::pixel_trigger;
    spec.target_label = 1;
    spec.trigger_coords = {{0, 5.0}, {1, 5.0}, {2, 5.0}, {3, 5.0}};

    SUBCASE("full decomposition") {
        const auto parts = dba_trigger_parts(spec, 4);
        REQUIRE(parts.size() == 4);
        std::set<std::size_t> seen;
        for (const auto& p : parts) {
            CHECK(p.trigger_coords.size() == 1);
            CHECK(p.target_label == 1);
            seen.insert(p.trigger_coords[0].first);
        }
        CHECK(seen == std::set<std::size_t>{0, 1, 2, 3});
    }
    SUBCASE("identity split") {
        const auto parts = dba_trigger_parts(spec, 1);
        REQUIRE(parts.size() == 1);
        CHECK(parts[0].trigger_coords == spec.trigger_coords);
    }
    SUBCASE("contiguous halves") {
        const auto parts = dba_trigger_parts(spec, 2);
        REQUIRE(parts.size() == 2);
        CHECK(parts[0].trigger_coords ==
              decltype(spec.trigger_coords){{0, 5.0}, {1, 5.0}});
        CHECK(parts[1].trigger_coords ==
              decltype(spec.trigger_coords){{2, 5.0}, {3, 5.0}});
    }
    SUBCASE("too many partitions") {
        CHECK_THROWS_AS(dba_trigger_parts(spec, 5), InfeasibilityError);
    }
}

TEST_CASE("craft_malicious_update: none matches benign training") {
    const learner::ModelSpec spec{8, 6, 2};
    const auto data = datakit::make_synthetic_dataset(2, 40, 8, 6.0, 5);
    Shard shard;
    shard.samples = data;
    learner::TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.local_iterations = 2;
    cfg.batch_size = 8;
    cfg.seed = 99;
    const auto global = learner::init_model(spec, 7);

    AttackSpec attack;
    attack.kind = AttackKind::none;
    const auto crafted = craft_malicious_update(global, spec, shard, attack, cfg);
    const auto benign = learner::train_local(global, spec, shard, cfg);
    CHECK(crafted.values == benign.values);
}

TEST_CASE("craft_malicious_update: pgd stays inside the ball") {
    const learner::ModelSpec spec{8, 6, 2};
    const auto data = datakit::make_synthetic_dataset(2, 40, 8, 6.0, 6);
    Shard shard;
    shard.samples = data;
    learner::TrainConfig cfg;
    cfg.learning_rate = 0.3;  // big steps so the projection actually binds
    cfg.local_iterations = 4;
    cfg.batch_size = 8;
    cfg.seed = 100;
    const auto global = learner::init_model(spec, 8);

    AttackSpec attack;
    attack.kind = AttackKind::pgd;
    attack.pgd_radius = 0.5;
    const auto crafted = craft_malicious_update(global, spec, shard, attack, cfg);
    CHECK(l2_norm(crafted - global) <= attack.pgd_radius + 1e-9);

    attack.kind = AttackKind::edge_case_pgd;
    const auto crafted2 = craft_malicious_update(global, spec, shard, attack, cfg);
    CHECK(l2_norm(crafted2 - global) <= attack.pgd_radius + 1e-9);
}

TEST_CASE("craft_malicious_update: model replacement scales the update") {
    const learner::ModelSpec spec{8, 6, 2};
    const auto data = datakit::make_synthetic_dataset(2, 40, 8, 6.0, 9);
    Shard shard;
    shard.samples = data;
    learner::TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.local_iterations = 2;
    cfg.batch_size = 8;
    cfg.seed = 55;
    const auto global = learner::init_model(spec, 10);

    AttackSpec attack;
    attack.kind = AttackKind::model_replacement;
    attack.scale_factor = 10.0;
    const auto crafted = craft_malicious_update(global, spec, shard, attack, cfg);
    // Recompute the pre-scale update with identical seeded training.
    const auto prescale = learner::train_local(global, spec, shard, cfg);
    CHECK(l2_norm(crafted - global) ==
          doctest::Approx(10.0 * l2_norm(prescale - global)).epsilon(1e-9));
}

TEST_CASE("replacement algebra: one scaled update against K-1 silent clients") {
    // With eta = 1, equal sizes, and K - 1 clients submitting the global
    // model, a factor-K scaled update reproduces the attacker's local model.
    auto gen = rng::engine(123);
    const std::size_t dim = 20;
    const auto global = random_pv(dim, gen);
    const auto local = random_pv(dim, gen);
    const int k = 5;

    const auto scaled = scale_update(global, local, static_cast<double>(k));
    ParameterVector agg(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        // K equal-size clients: one scaled, K-1 exactly at the global model.
        agg[i] = global[i] + (scaled[i] - global[i]) / static_cast<double>(k);
    }
    for (std::size_t i = 0; i < dim; ++i) {
        CHECK(agg[i] == doctest::Approx(local[i]).epsilon(1e-9));
    }
}
