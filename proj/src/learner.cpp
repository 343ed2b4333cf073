#include "fedlab/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "fedlab/errors.hpp"
#include "fedlab/rng.hpp"

namespace fedlab::learner {

namespace {

void check_spec(const ModelSpec& spec) {
    if (spec.input_dim < 1 || spec.hidden_dim < 1 || spec.num_classes < 1) {
        throw StructuralError("model spec dims must all be >= 1");
    }
}

void check_params(const ParameterVector& params, const ModelSpec& spec) {
    check_spec(spec);
    if (params.dim() != static_cast<std::size_t>(spec.param_dim())) {
        throw StructuralError("parameter dim " + std::to_string(params.dim()) +
                              " does not match spec dim " + std::to_string(spec.param_dim()));
    }
}

// Offsets into the flat parameter vector.
struct Layout {
    std::size_t w1, b1, w2, b2;
    explicit Layout(const ModelSpec& s)
        : w1(0),
          b1(static_cast<std::size_t>(s.input_dim) * static_cast<std::size_t>(s.hidden_dim)),
          w2(b1 + static_cast<std::size_t>(s.hidden_dim)),
          b2(w2 + static_cast<std::size_t>(s.hidden_dim) * static_cast<std::size_t>(s.num_classes)) {}
};

// Forward pass for one sample; fills hidden pre-activations and class
// probabilities, returns the cross-entropy of the labeled class.
double forward(const ParameterVector& params, const ModelSpec& spec, const Layout& off,
               const datakit::Sample& sample, std::vector<double>& z1, std::vector<double>& prob) {
    const int in = spec.input_dim;
    const int hid = spec.hidden_dim;
    const int cls = spec.num_classes;
    if (sample.features.size() != static_cast<std::size_t>(in)) {
        throw StructuralError("sample feature dim does not match model input dim");
    }

    z1.assign(static_cast<std::size_t>(hid), 0.0);
    for (int h = 0; h < hid; ++h) {
        double s = params[off.b1 + static_cast<std::size_t>(h)];
        const std::size_t row = off.w1 + static_cast<std::size_t>(h) * static_cast<std::size_t>(in);
        for (int i = 0; i < in; ++i) {
            s += params[row + static_cast<std::size_t>(i)] * sample.features[static_cast<std::size_t>(i)];
        }
        z1[static_cast<std::size_t>(h)] = s;
    }

    prob.assign(static_cast<std::size_t>(cls), 0.0);
    double zmax = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < cls; ++c) {
        double s = params[off.b2 + static_cast<std::size_t>(c)];
        const std::size_t row = off.w2 + static_cast<std::size_t>(c) * static_cast<std::size_t>(hid);
        for (int h = 0; h < hid; ++h) {
            const double a = std::max(z1[static_cast<std::size_t>(h)], 0.0);
            s += params[row + static_cast<std::size_t>(h)] * a;
        }
        prob[static_cast<std::size_t>(c)] = s;
        zmax = std::max(zmax, s);
    }
    double denom = 0.0;
    for (double& p : prob) {
        p = std::exp(p - zmax);
        denom += p;
    }
    for (double& p : prob) p /= denom;

    const auto y = static_cast<std::size_t>(sample.label);
    if (y >= prob.size()) throw StructuralError("sample label out of range");
    return -std::log(std::max(prob[y], 1e-300));
}

}  // namespace

ParameterVector init_model(const ModelSpec& spec, std::uint64_t seed) {
    check_spec(spec);
    auto gen = rng::engine(seed);
    ParameterVector params(static_cast<std::size_t>(spec.param_dim()), 0.0);
    const Layout off(spec);

    const double a1 = std::sqrt(6.0 / static_cast<double>(spec.input_dim + spec.hidden_dim));
    std::uniform_real_distribution<double> u1(-a1, a1);
    for (std::size_t i = off.w1; i < off.b1; ++i) params[i] = u1(gen);

    const double a2 = std::sqrt(6.0 / static_cast<double>(spec.hidden_dim + spec.num_classes));
    std::uniform_real_distribution<double> u2(-a2, a2);
    for (std::size_t i = off.w2; i < off.b2; ++i) params[i] = u2(gen);

    return params;
}

std::pair<double, ParameterVector> loss_and_gradient(const ParameterVector& params,
                                                     const ModelSpec& spec,
                                                     std::span<const datakit::Sample> batch) {
    check_params(params, spec);
    if (batch.empty()) throw StructuralError("loss_and_gradient requires a nonempty batch");

    const int in = spec.input_dim;
    const int hid = spec.hidden_dim;
    const int cls = spec.num_classes;
    const Layout off(spec);

    ParameterVector grad(params.dim(), 0.0);
    std::vector<double> z1, prob, dz1(static_cast<std::size_t>(hid));
    double loss = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    for (const auto& sample : batch) {
        loss += forward(params, spec, off, sample, z1, prob);

        // dL/dz2[c] = prob[c] - 1{c == label}, averaged over the batch.
        std::fill(dz1.begin(), dz1.end(), 0.0);
        for (int c = 0; c < cls; ++c) {
            const double d = (prob[static_cast<std::size_t>(c)] -
                              (c == sample.label ? 1.0 : 0.0)) * inv_b;
            grad[off.b2 + static_cast<std::size_t>(c)] += d;
            const std::size_t row = off.w2 + static_cast<std::size_t>(c) * static_cast<std::size_t>(hid);
            for (int h = 0; h < hid; ++h) {
                const double a = std::max(z1[static_cast<std::size_t>(h)], 0.0);
                grad[row + static_cast<std::size_t>(h)] += d * a;
                if (z1[static_cast<std::size_t>(h)] > 0.0) {
                    dz1[static_cast<std::size_t>(h)] += d * params[row + static_cast<std::size_t>(h)];
                }
            }
        }
        for (int h = 0; h < hid; ++h) {
            const double d = dz1[static_cast<std::size_t>(h)];
            if (d == 0.0) continue;
            grad[off.b1 + static_cast<std::size_t>(h)] += d;
            const std::size_t row = off.w1 + static_cast<std::size_t>(h) * static_cast<std::size_t>(in);
            for (int i = 0; i < in; ++i) {
                grad[row + static_cast<std::size_t>(i)] += d * sample.features[static_cast<std::size_t>(i)];
            }
        }
    }
    return {loss * inv_b, std::move(grad)};
}

void sgd_epoch(ParameterVector& params, const ModelSpec& spec,
               const std::vector<datakit::Sample>& samples, double learning_rate, int batch_size,
               std::mt19937_64& gen) {
    if (batch_size < 1) throw StructuralError("batch_size must be >= 1");
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);

    std::vector<datakit::Sample> batch;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
        const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
        batch.clear();
        for (std::size_t i = start; i < end; ++i) batch.push_back(samples[order[i]]);
        auto [loss, grad] = loss_and_gradient(params, spec, batch);
        (void)loss;
        for (std::size_t i = 0; i < params.dim(); ++i) params[i] -= learning_rate * grad[i];
    }
}

ParameterVector train_local(const ParameterVector& start, const ModelSpec& spec,
                            const datakit::Shard& shard, const TrainConfig& cfg) {
    check_params(start, spec);
    if (shard.samples.empty()) throw InfeasibilityError("train_local: empty shard");
    if (cfg.learning_rate < 0.0) throw StructuralError("learning_rate must be nonnegative");
    if (cfg.local_iterations < 0) throw StructuralError("local_iterations must be nonnegative");

    ParameterVector params = start;
    auto gen = rng::engine(cfg.seed);
    for (int e = 0; e < cfg.local_iterations; ++e) {
        sgd_epoch(params, spec, shard.samples, cfg.learning_rate, cfg.batch_size, gen);
    }
    return params;
}

int predict(const ParameterVector& params, const ModelSpec& spec, const datakit::Sample& sample) {
    check_params(params, spec);
    const Layout off(spec);
    std::vector<double> z1, prob;
    forward(params, spec, off, sample, z1, prob);
    int best = 0;
    for (int c = 1; c < spec.num_classes; ++c) {
        if (prob[static_cast<std::size_t>(c)] > prob[static_cast<std::size_t>(best)]) best = c;
    }
    return best;
}

double evaluate(const ParameterVector& params, const ModelSpec& spec,
                std::span<const datakit::Sample> testset) {
    check_params(params, spec);
    if (testset.empty()) throw StructuralError("evaluate requires a nonempty test set");
    std::size_t correct = 0;
    for (const auto& s : testset) {
        if (predict(params, spec, s) == s.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(testset.size());
}

}  // namespace fedlab::learner
