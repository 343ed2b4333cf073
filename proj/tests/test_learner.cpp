#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fedlab/errors.hpp"
#include "fedlab/learner.hpp"
#include "fedlab/rng.hpp"
#include "oracles.hpp"

using namespace fedlab;
using namespace fedlab::learner;
using fedlab::datakit::Sample;
using fedlab::datakit::Shard;

namespace {

Sample make_sample(std::vector<double> features, int label) {
    Sample s;
    s.features = std::move(features);
    s.label = label;
    return s;
}

std::vector<Sample> random_batch(const ModelSpec& spec, int n, std::mt19937_64& gen) {
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_int_distribution<int> lab(0, spec.num_classes - 1);
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        std::vector<double> f(static_cast<std::size_t>(spec.input_dim));
        for (double& x : f) x = noise(gen);
        out.push_back(make_sample(std::move(f), lab(gen)));
    }
    return out;
}

}  // namespace

TEST_CASE("init_model: dimension contract, determinism, nondegeneracy") {
    const ModelSpec spec{7, 5, 3};
    CHECK(spec.param_dim() == 7 * 5 + 5 + 5 * 3 + 3);

    const auto a = init_model(spec, 123);
    const auto b = init_model(spec, 123);
    const auto c = init_model(spec, 124);
    CHECK(a.dim() == static_cast<std::size_t>(spec.param_dim()));
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.finite());
}

TEST_CASE("loss_and_gradient: uniform logits give ln(C)") {
    const ModelSpec spec{4, 6, 3};
    const ParameterVector zeros(static_cast<std::size_t>(spec.param_dim()), 0.0);
    auto gen = rng::engine(1);
    const auto batch = random_batch(spec, 5, gen);
    const auto [loss, grad] = loss_and_gradient(zeros, spec, batch);
    CHECK(loss == doctest::Approx(std::log(3.0)));
    CHECK(grad.dim() == zeros.dim());
}

TEST_CASE("loss_and_gradient: duplicated batch changes nothing") {
    const ModelSpec spec{4, 6, 3};
    auto gen = rng::engine(2);
    const auto params = init_model(spec, 3);
    const auto batch = random_batch(spec, 4, gen);
    std::vector<Sample> doubled = batch;
    doubled.insert(doubled.end(), batch.begin(), batch.end());

    const auto [l1, g1] = loss_and_gradient(params, spec, batch);
    const auto [l2, g2] = loss_and_gradient(params, spec, doubled);
    CHECK(l1 == doctest::Approx(l2).epsilon(1e-12));
    for (std::size_t i = 0; i < g1.dim(); ++i) {
        CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-10));
    }
}

TEST_CASE("loss_and_gradient: errors") {
    const ModelSpec spec{4, 6, 3};
    const auto params = init_model(spec, 3);
    CHECK_THROWS_AS(loss_and_gradient(params, spec, std::span<const Sample>{}), StructuralError);
    const ParameterVector wrong(5, 0.0);
    auto gen = rng::engine(2);
    const auto batch = random_batch(spec, 2, gen);
    CHECK_THROWS_AS(loss_and_gradient(wrong, spec, batch), StructuralError);
}

TEST_CASE("gradient matches central finite differences on 50 random cases") {
    const ModelSpec spec{5, 4, 3};
    auto gen = rng::engine(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto params = init_model(spec, 1000 + static_cast<std::uint64_t>(trial));
        const auto batch = random_batch(spec, trial % 3 + 1, gen);
        const auto [loss, grad] = loss_and_gradient(params, spec, batch);
        (void)loss;
        const auto fd = oracles::finite_difference_gradient(params, spec, batch, 1e-5);

        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < grad.dim(); ++i) {
            num += (grad[i] - fd[i]) * (grad[i] - fd[i]);
            den += fd[i] * fd[i];
        }
        const double rel = std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
        CHECK(rel < 1e-4);
    }
}

TEST_CASE("one small SGD step never increases the full-batch loss") {
    const ModelSpec spec{5, 4, 3};
    auto gen = rng::engine(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto params = init_model(spec, 2000 + static_cast<std::uint64_t>(trial));
        const auto batch = random_batch(spec, 8, gen);
        const auto [before, grad] = loss_and_gradient(params, spec, batch);
        ParameterVector stepped = params;
        for (std::size_t i = 0; i < stepped.dim(); ++i) stepped[i] -= 1e-3 * grad[i];
        const double after = loss_and_gradient(stepped, spec, batch).first;
        CHECK(after <= before + 1e-9);
    }
}

TEST_CASE("train_local: zero learning rate returns the start exactly") {
    const ModelSpec spec{6, 5, 2};
    Shard shard;
    auto gen = rng::engine(13);
    shard.samples = random_batch(spec, 12, gen);
    const auto start = init_model(spec, 5);
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.local_iterations = 3;
    cfg.batch_size = 4;
    cfg.seed = 9;
    const auto end = train_local(start, spec, shard, cfg);
    CHECK(end.values == start.values);
}

TEST_CASE("train_local: separable blobs reach 95% train accuracy") {
    const auto data = datakit::make_synthetic_dataset(2, 100, 10, 6.0, 7);
    Shard shard;
    shard.samples = data;
    const ModelSpec spec{10, 8, 2};
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    cfg.local_iterations = 5;
    cfg.batch_size = 16;
    cfg.seed = 3;
    const auto start = init_model(spec, 21);
    const auto end = train_local(start, spec, shard, cfg);
    CHECK(evaluate(end, spec, shard.samples) >= 0.95);
    // start untouched
    CHECK(start.values == init_model(spec, 21).values);
}

TEST_CASE("train_local: determinism and empty-shard error") {
    const ModelSpec spec{6, 5, 2};
    Shard shard;
    auto gen = rng::engine(17);
    shard.samples = random_batch(spec, 10, gen);
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    cfg.local_iterations = 2;
    cfg.batch_size = 3;
    cfg.seed = 77;
    const auto start = init_model(spec, 1);
    const auto a = train_local(start, spec, shard, cfg);
    const auto b = train_local(start, spec, shard, cfg);
    CHECK(a.values == b.values);

    Shard empty;
    CHECK_THROWS_AS(train_local(start, spec, empty, cfg), InfeasibilityError);
}

TEST_CASE("evaluate: self-labeled set gives accuracy 1") {
    const ModelSpec spec{5, 4, 3};
    const auto params = init_model(spec, 31);
    auto gen = rng::engine(19);
    auto testset = random_batch(spec, 50, gen);
    for (auto& s : testset) s.label = predict(params, spec, s);
    CHECK(evaluate(params, spec, testset) == 1.0);
}

TEST_CASE("evaluate: all-zero params predict class 0 via tie-break") {
    const ModelSpec spec{5, 4, 2};
    const ParameterVector zeros(static_cast<std::size_t>(spec.param_dim()), 0.0);
    auto gen = rng::engine(23);
    const auto testset = random_batch(spec, 200, gen);
    double zero_frac = 0.0;
    for (const auto& s : testset) zero_frac += (s.label == 0) ? 1.0 : 0.0;
    zero_frac /= static_cast<double>(testset.size());
    CHECK(evaluate(zeros, spec, testset) == doctest::Approx(zero_frac));
}

TEST_CASE("evaluate: random params sit near chance on a balanced set") {
    const ModelSpec spec{6, 8, 4};
    const auto params = init_model(spec, 37);
    std::vector<Sample> testset;
    auto gen = rng::engine(29);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> f(6);
        for (double& x : f) x = noise(gen);
        testset.push_back(make_sample(std::move(f), i % 4));
    }
    const double acc = evaluate(params, spec, testset);
    // Binomial(1000, 1/4): 5 sigma is about 0.0685.
    CHECK(std::abs(acc - 0.25) < 5.0 * std::sqrt(0.25 * 0.75 / 1000.0));
}

TEST_CASE("flattening round-trip: copied parameters predict identically") {
    const ModelSpec spec{6, 5, 3};
    const auto params = init_model(spec, 41);
    const ParameterVector copy(params.values);
    auto gen = rng::engine(43);
    const auto testset = random_batch(spec, 40, gen);
    for (const auto& s : testset) {
        CHECK(predict(params, spec, s) == predict(copy, spec, s));
    }
}
