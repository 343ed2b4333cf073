#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "fedlab/vecmath.hpp"

namespace fedlab::defenses {

struct ClientUpdate {
    int client_id = 0;
    ParameterVector model;
    int num_samples = 1;  // n^(i), trusted as reported
};

enum class DefenseKind {
    fedavg,
    multi_metrics,
    multi_metrics_maxnorm,
    multi_metrics_mean,
    krum,
    multi_krum,
    rfa,
    foolsgold,
    weak_dp,
};

struct DefenseSpec {
    DefenseKind kind = DefenseKind::fedavg;
    /// Fraction of clients kept as benign by the multi-metrics family.
    double p = 0.3;
    /// Tolerable attackers for the Krum family.
    int f = 0;
    double clip_threshold = 2.0;
    double noise_sigma = 0.0025;
    double rfa_smoothing = 1e-5;
    double rfa_tolerance = 1e-1;
    int rfa_max_iters = 500;
    /// Global model learning rate eta.
    double eta = 1.0;
    /// Mean-center the divergence rows before the covariance (standard);
    /// false switches to the raw second moment, kept for sensitivity checks.
    bool center_covariance = true;
};

struct AggregationResult {
    ParameterVector model;
    std::vector<int> selected_ids;  // ascending client ids deemed benign
    std::vector<double> scores;     // aligned with the submitted update order
    std::string dominant_metric;    // "man", "eul", "cos", or "n/a"
};

/// Round-scoped state owned by the caller: Foolsgold's cumulative history
/// and the seed for any randomness a rule consumes (weak_dp noise).
struct DefenseContext {
    std::unordered_map<int, ParameterVector> foolsgold_history;
    std::uint64_t round_seed = 0;
};

/// w* = w0 + eta * sum(n_i (w_i - w0)) / sum(n_i), fixed summation order by
/// ascending client id.
AggregationResult fedavg(const ParameterVector& global, const std::vector<ClientUpdate>& updates,
                         double eta);

/// The multi-metrics defense: gradient features, pairwise divergence rows,
/// covariance whitening, Mahalanobis scores, removal of the ceil(K(1-p))
/// highest scores, FedAvg over the rest.
AggregationResult multi_metrics(const ParameterVector& global,
                                const std::vector<ClientUpdate>& updates,
                                const DefenseSpec& spec);

/// Ablation: per-coordinate max normalization of the rows instead of
/// covariance whitening.
AggregationResult multi_metrics_maxnorm(const ParameterVector& global,
                                        const std::vector<ClientUpdate>& updates,
                                        const DefenseSpec& spec);

/// Ablation: per-coordinate absolute deviation from the mean feature instead
/// of the pairwise sums; whitening unchanged.
AggregationResult multi_metrics_mean(const ParameterVector& global,
                                     const std::vector<ClientUpdate>& updates,
                                     const DefenseSpec& spec);

AggregationResult krum(const ParameterVector& global, const std::vector<ClientUpdate>& updates,
                       const DefenseSpec& spec);

AggregationResult multi_krum(const ParameterVector& global,
                             const std::vector<ClientUpdate>& updates, const DefenseSpec& spec);

/// Smoothed Weiszfeld geometric median of the client models, weighted by
/// n_i; w* = w0 + eta * (median - w0).
AggregationResult rfa(const ParameterVector& global, const std::vector<ClientUpdate>& updates,
                      const DefenseSpec& spec);

/// Cosine-similarity reweighting over cumulative per-client histories.
AggregationResult foolsgold(DefenseContext& ctx, const ParameterVector& global,
                            const std::vector<ClientUpdate>& updates, const DefenseSpec& spec);

/// Norm clipping + FedAvg + per-coordinate Gaussian noise (seeded).
AggregationResult weak_dp(const ParameterVector& global, const std::vector<ClientUpdate>& updates,
                          const DefenseSpec& spec, std::uint64_t noise_seed);

/// Dispatch on spec.kind.
AggregationResult aggregate(const ParameterVector& global,
                            const std::vector<ClientUpdate>& updates, const DefenseSpec& spec,
                            DefenseContext& ctx);

const char* to_string(DefenseKind kind);

}  // namespace fedlab::defenses
