#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fedlab::datakit {

struct Sample {
    std::vector<double> features;
    int label = 0;
};

struct Shard {
    int client_id = 0;
    std::vector<Sample> samples;
    int poisoned_count = 0;
};

enum class BackdoorKind { pixel_trigger, edge_case };

struct BackdoorSpec {
    BackdoorKind kind = BackdoorKind::pixel_trigger;
    int target_label = 0;
    /// (feature index, overwrite value) pairs; the trigger pattern.
    std::vector<std::pair<std::size_t, double>> trigger_coords;
    /// Center/radius of the synthetic tail cluster for edge_case.
    std::vector<double> edge_center;
    double edge_radius = 1.0;
    /// pixel_trigger: fraction of shard samples poisoned.
    /// edge_case: ratio of injected edge samples to existing shard samples.
    double poison_fraction = 0.5;
};

/// Gaussian blob per class, unit isotropic variance, class means placed at
/// (class_separation / sqrt(2)) * e_c so every pair of means is exactly
/// class_separation apart. Requires num_classes <= feature_dim.
std::vector<Sample> make_synthetic_dataset(int num_classes, int samples_per_class,
                                           int feature_dim, double class_separation,
                                           std::uint64_t seed);

/// Mean of class c in the synthetic dataset layout above.
std::vector<double> synthetic_class_mean(int cls, int feature_dim, double class_separation);

/// Per class, draws client proportions from Dirichlet(alpha,...,alpha) and
/// splits that class's samples accordingly. Every sample lands in exactly one
/// shard; assignments with an empty shard are redrawn (up to 100 attempts).
std::vector<Shard> dirichlet_partition(const std::vector<Sample>& data, int num_clients,
                                       double alpha, std::uint64_t seed);

/// Overwrites the trigger coordinates in-place; leaves the label alone.
void apply_trigger(Sample& sample, const BackdoorSpec& spec);

/// pixel_trigger: stamps ceil(poison_fraction * n) randomly chosen samples
/// and relabels them to target_label. edge_case: appends
/// ceil(poison_fraction * n) samples drawn uniformly within edge_radius of
/// edge_center, labeled target_label.
Shard inject_backdoor(const Shard& shard, const BackdoorSpec& spec, std::uint64_t seed);

/// Test set for backdoor accuracy. pixel_trigger: `size` draws (with
/// replacement) from base samples whose label differs from target_label,
/// stamped and relabeled; edge_case: `size` fresh edge-cluster samples.
std::vector<Sample> make_backdoor_testset(const BackdoorSpec& spec,
                                          const std::vector<Sample>& base, int size,
                                          std::uint64_t seed);

/// One row per sample: feature values then the integer label, after a
/// "f0,...,f{d-1},label" header.
void write_samples_csv(const std::string& path, const std::vector<Sample>& samples);

}  // namespace fedlab::datakit
