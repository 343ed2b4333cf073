#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

#include "fedlab/datakit.hpp"
#include "fedlab/vecmath.hpp"

namespace fedlab::learner {

/// One-hidden-layer MLP with rectified-linear activation.
struct ModelSpec {
    int input_dim = 0;
    int hidden_dim = 0;
    int num_classes = 0;

    /// Flattened parameter count: layer-1 weights (row-major, one row per
    /// hidden unit), layer-1 biases, layer-2 weights (row-major, one row per
    /// class), layer-2 biases.
    int param_dim() const {
        return input_dim * hidden_dim + hidden_dim + hidden_dim * num_classes + num_classes;
    }
};

struct TrainConfig {
    double learning_rate = 0.1;
    int local_iterations = 1;  // epochs over the shard
    int batch_size = 32;
    std::uint64_t seed = 0;
};

/// Glorot-style scaled uniform weights, zero biases.
ParameterVector init_model(const ModelSpec& spec, std::uint64_t seed);

/// Mean softmax cross-entropy over the batch and its exact gradient, in the
/// flattening order documented on ModelSpec.
std::pair<double, ParameterVector> loss_and_gradient(const ParameterVector& params,
                                                     const ModelSpec& spec,
                                                     std::span<const datakit::Sample> batch);

/// One shuffled pass of mini-batch SGD over the samples; the remainder batch
/// is kept. Exposed so attack crafting can interleave its own steps between
/// epochs.
void sgd_epoch(ParameterVector& params, const ModelSpec& spec,
               const std::vector<datakit::Sample>& samples, double learning_rate, int batch_size,
               std::mt19937_64& gen);

/// cfg.local_iterations epochs of mini-batch SGD, shuffling per epoch from
/// cfg.seed. `start` is never mutated.
ParameterVector train_local(const ParameterVector& start, const ModelSpec& spec,
                            const datakit::Shard& shard, const TrainConfig& cfg);

/// Fraction of argmax-correct predictions in [0,1]; logit ties break toward
/// the lowest class index.
double evaluate(const ParameterVector& params, const ModelSpec& spec,
                std::span<const datakit::Sample> testset);

/// Argmax prediction for one sample (same tie-break as evaluate).
int predict(const ParameterVector& params, const ModelSpec& spec, const datakit::Sample& sample);

}  // namespace fedlab::learner
