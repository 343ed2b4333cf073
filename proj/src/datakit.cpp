#include "fedlab/datakit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "fedlab/errors.hpp"
#include "fedlab/rng.hpp"

namespace fedlab::datakit {

std::vector<double> synthetic_class_mean(int cls, int feature_dim, double class_separation) {
    std::vector<double> mean(static_cast<std::size_t>(feature_dim), 0.0);
    mean[static_cast<std::size_t>(cls)] = class_separation / std::sqrt(2.0);
    return mean;
}

std::vector<Sample> make_synthetic_dataset(int num_classes, int samples_per_class,
                                           int feature_dim, double class_separation,
                                           std::uint64_t seed) {
    if (num_classes < 2) throw StructuralError("make_synthetic_dataset requires num_classes >= 2");
    if (feature_dim < 2) throw StructuralError("make_synthetic_dataset requires feature_dim >= 2");
    if (num_classes > feature_dim) {
        throw StructuralError("make_synthetic_dataset requires num_classes <= feature_dim");
    }
    if (samples_per_class < 0) throw StructuralError("samples_per_class must be nonnegative");
    if (class_separation <= 0.0) throw StructuralError("class_separation must be positive");

    auto gen = rng::engine(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(samples_per_class));
    for (int c = 0; c < num_classes; ++c) {
        const auto mean = synthetic_class_mean(c, feature_dim, class_separation);
        for (int s = 0; s < samples_per_class; ++s) {
            Sample sample;
            sample.label = c;
            sample.features.resize(static_cast<std::size_t>(feature_dim));
            for (int i = 0; i < feature_dim; ++i) {
                sample.features[static_cast<std::size_t>(i)] =
                    mean[static_cast<std::size_t>(i)] + noise(gen);
            }
            out.push_back(std::move(sample));
        }
    }
    return out;
}

std::vector<Shard> dirichlet_partition(const std::vector<Sample>& data, int num_clients,
                                       double alpha, std::uint64_t seed) {
    if (num_clients < 1) throw StructuralError("dirichlet_partition requires num_clients >= 1");
    if (alpha <= 0.0) throw StructuralError("dirichlet_partition requires alpha > 0");
    if (data.size() < static_cast<std::size_t>(num_clients)) {
        throw InfeasibilityError("fewer samples (" + std::to_string(data.size()) +
                                 ") than clients (" + std::to_string(num_clients) + ")");
    }

    // Sample indices per class, in dataset order.
    int num_classes = 0;
    for (const auto& s : data) num_classes = std::max(num_classes, s.label + 1);
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < data.size(); ++i) {
        by_class[static_cast<std::size_t>(data[i].label)].push_back(i);
    }

    auto gen = rng::engine(seed);
    std::gamma_distribution<double> gamma(alpha, 1.0);

    for (int attempt = 0; attempt < 100; ++attempt) {
        std::vector<std::vector<std::size_t>> assignment(static_cast<std::size_t>(num_clients));
        for (auto& cls : by_class) {
            if (cls.empty()) continue;
            std::vector<std::size_t> idx = cls;
            std::shuffle(idx.begin(), idx.end(), gen);

            std::vector<double> prop(static_cast<std::size_t>(num_clients));
            double total = 0.0;
            for (double& p : prop) {
                p = gamma(gen);
                total += p;
            }
            if (total <= 0.0) {
                // All gamma draws underflowed (tiny alpha); dump the class on one client.
                prop.assign(prop.size(), 0.0);
                prop[0] = 1.0;
                total = 1.0;
            }

            // Cut the shuffled class at cumulative-proportion boundaries.
            const double n = static_cast<double>(idx.size());
            double cum = 0.0;
            std::size_t start = 0;
            for (int c = 0; c < num_clients; ++c) {
                cum += prop[static_cast<std::size_t>(c)] / total;
                const std::size_t end =
                    (c == num_clients - 1)
                        ? idx.size()
                        : std::min(idx.size(), static_cast<std::size_t>(std::floor(cum * n)));
                for (std::size_t i = start; i < end; ++i) {
                    assignment[static_cast<std::size_t>(c)].push_back(idx[i]);
                }
                start = std::max(start, end);
            }
        }

        const bool any_empty = std::any_of(assignment.begin(), assignment.end(),
                                           [](const auto& a) { return a.empty(); });
        if (any_empty) continue;

        std::vector<Shard> shards(static_cast<std::size_t>(num_clients));
        for (int c = 0; c < num_clients; ++c) {
            shards[static_cast<std::size_t>(c)].client_id = c;
            for (std::size_t i : assignment[static_cast<std::size_t>(c)]) {
                shards[static_cast<std::size_t>(c)].samples.push_back(data[i]);
            }
        }
        return shards;
    }
    throw InfeasibilityError("dirichlet_partition: could not avoid empty shards in 100 attempts");
}

void apply_trigger(Sample& sample, const BackdoorSpec& spec) {
    for (const auto& [idx, value] : spec.trigger_coords) {
        if (idx >= sample.features.size()) {
            throw StructuralError("trigger index " + std::to_string(idx) +
                                  " out of range for feature dim " +
                                  std::to_string(sample.features.size()));
        }
        sample.features[idx] = value;
    }
}

namespace {

std::vector<double> sample_in_ball(const std::vector<double>& center, double radius,
                                   std::mt19937_64& gen) {
    // Uniform in the L2 ball: normalized Gaussian direction, radius u^{1/d}.
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t d = center.size();
    std::vector<double> dir(d);
    double norm2 = 0.0;
    for (double& x : dir) {
        x = normal(gen);
        norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    const double r = radius * std::pow(unit(gen), 1.0 / static_cast<double>(d));
    std::vector<double> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        out[i] = center[i] + (norm > 0.0 ? r * dir[i] / norm : 0.0);
    }
    return out;
}

void check_edge_spec(const BackdoorSpec& spec) {
    if (spec.edge_center.empty()) {
        throw StructuralError("edge_case backdoor requires a nonempty edge_center");
    }
    if (spec.edge_radius <= 0.0) {
        throw StructuralError("edge_case backdoor requires edge_radius > 0");
    }
}

}  // namespace

Shard inject_backdoor(const Shard& shard, const BackdoorSpec& spec, std::uint64_t seed) {
    if (spec.poison_fraction < 0.0 || spec.poison_fraction > 1.0) {
        throw StructuralError("poison_fraction must be in [0, 1]");
    }
    Shard out = shard;
    const std::size_t n = shard.samples.size();
    const auto count =
        static_cast<std::size_t>(std::ceil(spec.poison_fraction * static_cast<double>(n)));
    if (count == 0) {
        out.poisoned_count = 0;
        return out;
    }

    auto gen = rng::engine(seed);
    if (spec.kind == BackdoorKind::pixel_trigger) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), gen);
        const std::size_t m = std::min(count, n);
        for (std::size_t i = 0; i < m; ++i) {
            Sample& s = out.samples[idx[i]];
            apply_trigger(s, spec);
            s.label = spec.target_label;
        }
        out.poisoned_count = static_cast<int>(m);
    } else {
        check_edge_spec(spec);
        if (!shard.samples.empty() && spec.edge_center.size() != shard.samples[0].features.size()) {
            throw StructuralError("edge_center dimension does not match shard feature dim");
        }
        for (std::size_t i = 0; i < count; ++i) {
            Sample s;
            s.features = sample_in_ball(spec.edge_center, spec.edge_radius, gen);
            s.label = spec.target_label;
            out.samples.push_back(std::move(s));
        }
        out.poisoned_count = static_cast<int>(count);
    }
    return out;
}

std::vector<Sample> make_backdoor_testset(const BackdoorSpec& spec,
                                          const std::vector<Sample>& base, int size,
                                          std::uint64_t seed) {
    if (size < 1) throw StructuralError("make_backdoor_testset requires size >= 1");
    auto gen = rng::engine(seed);
    std::vector<Sample> out;
    out.reserve(static_cast<std::size_t>(size));

    if (spec.kind == BackdoorKind::pixel_trigger) {
        // Only non-target samples: backdoor accuracy must measure induced
        // misclassification, not pre-existing target-class membership.
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < base.size(); ++i) {
            if (base[i].label != spec.target_label) pool.push_back(i);
        }
        if (pool.empty()) {
            throw InfeasibilityError("backdoor testset: no base samples with label != target");
        }
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        for (int i = 0; i < size; ++i) {
            Sample s = base[pool[pick(gen)]];
            apply_trigger(s, spec);
            s.label = spec.target_label;
            out.push_back(std::move(s));
        }
    } else {
        check_edge_spec(spec);
        for (int i = 0; i < size; ++i) {
            Sample s;
            s.features = sample_in_ball(spec.edge_center, spec.edge_radius, gen);
            s.label = spec.target_label;
            out.push_back(std::move(s));
        }
    }
    return out;
}

void write_samples_csv(const std::string& path, const std::vector<Sample>& samples) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw InfeasibilityError("cannot open " + path + " for writing");
    const std::size_t d = samples.empty() ? 0 : samples[0].features.size();
    for (std::size_t i = 0; i < d; ++i) f << "f" << i << ",";
    f << "label\n";
    f.precision(17);
    for (const auto& s : samples) {
        if (s.features.size() != d) {
            throw StructuralError("inconsistent feature length in dataset");
        }
        for (double v : s.features) f << v << ",";
        f << s.label << "\n";
    }
}

}  // namespace fedlab::datakit
