#include "fedlab/attacks.hpp"

#include <cmath>

#include "fedlab/errors.hpp"
#include "fedlab/rng.hpp"

namespace fedlab::attacks {

ParameterVector scale_update(const ParameterVector& global, const ParameterVector& local,
                             double factor) {
    check_same_dim(global, local);
    if (factor <= 0.0) throw StructuralError("scale factor must be positive");
    ParameterVector out(global.dim());
    for (std::size_t i = 0; i < global.dim(); ++i) {
        out[i] = global[i] + factor * (local[i] - global[i]);
    }
    return out;
}

ParameterVector project_l2_ball(const ParameterVector& global, const ParameterVector& candidate,
                                double radius) {
    check_same_dim(global, candidate);
    if (radius <= 0.0) throw StructuralError("projection radius must be positive");
    const double norm = l2_norm(candidate - global);
    // The tolerance band keeps re-projection a bitwise no-op: a freshly
    // projected point whose recomputed norm lands a few ulps above the radius
    // must not be rescaled again.
    if (norm <= radius * (1.0 + 1e-12)) return candidate;
    const double s = radius / norm;
    ParameterVector out(global.dim());
    for (std::size_t i = 0; i < global.dim(); ++i) {
        out[i] = global[i] + s * (candidate[i] - global[i]);
    }
    return out;
}

std::vector<datakit::BackdoorSpec> dba_trigger_parts(const datakit::BackdoorSpec& spec,
                                                     int partitions) {
    if (partitions < 1) throw StructuralError("dba_trigger_parts requires partitions >= 1");
    const std::size_t n = spec.trigger_coords.size();
    if (static_cast<std::size_t>(partitions) > n) {
        throw InfeasibilityError("cannot split " + std::to_string(n) + " trigger coords into " +
                                 std::to_string(partitions) + " parts");
    }
    std::vector<datakit::BackdoorSpec> parts;
    parts.reserve(static_cast<std::size_t>(partitions));
    const std::size_t base = n / static_cast<std::size_t>(partitions);
    const std::size_t extra = n % static_cast<std::size_t>(partitions);
    std::size_t start = 0;
    for (std::size_t p = 0; p < static_cast<std::size_t>(partitions); ++p) {
        const std::size_t len = base + (p < extra ? 1 : 0);
        datakit::BackdoorSpec part = spec;
        part.trigger_coords.assign(spec.trigger_coords.begin() + static_cast<std::ptrdiff_t>(start),
                                   spec.trigger_coords.begin() + static_cast<std::ptrdiff_t>(start + len));
        parts.push_back(std::move(part));
        start += len;
    }
    return parts;
}

ParameterVector craft_malicious_update(const ParameterVector& global,
                                       const learner::ModelSpec& spec,
                                       const datakit::Shard& poisoned_shard,
                                       const AttackSpec& attack, const learner::TrainConfig& cfg) {
    switch (attack.kind) {
        case AttackKind::none:
        case AttackKind::dba:
            return learner::train_local(global, spec, poisoned_shard, cfg);

        case AttackKind::model_replacement: {
            const ParameterVector local = learner::train_local(global, spec, poisoned_shard, cfg);
            return scale_update(global, local, attack.scale_factor);
        }

        case AttackKind::pgd:
        case AttackKind::edge_case_pgd: {
            if (poisoned_shard.samples.empty()) {
                throw InfeasibilityError("craft_malicious_update: empty shard");
            }
            // Same epoch stream as train_local, with a projection after each
            // epoch and a final one.
            ParameterVector params = global;
            auto gen = rng::engine(cfg.seed);
            for (int e = 0; e < cfg.local_iterations; ++e) {
                learner::sgd_epoch(params, spec, poisoned_shard.samples, cfg.learning_rate,
                                   cfg.batch_size, gen);
                params = project_l2_ball(global, params, attack.pgd_radius);
            }
            return project_l2_ball(global, params, attack.pgd_radius);
        }
    }
    throw StructuralError("unknown attack kind");
}

}  // namespace fedlab::attacks
