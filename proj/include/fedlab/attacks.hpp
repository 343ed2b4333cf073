#pragma once

#include "fedlab/datakit.hpp"
#include "fedlab/learner.hpp"
#include "fedlab/vecmath.hpp"

namespace fedlab::attacks {

enum class AttackKind { none, model_replacement, dba, pgd, edge_case_pgd };

struct AttackSpec {
    AttackKind kind = AttackKind::none;
    /// Model replacement scale; the conventional choice is N/K.
    double scale_factor = 1.0;
    /// Radius of the L2 ball around the global model for the PGD family.
    double pgd_radius = 2.0;
    /// Number of disjoint trigger parts for DBA.
    int dba_partitions = 1;
    datakit::BackdoorSpec backdoor;
    /// Attackers participate on rounds divisible by this (multiple-shot schedule).
    int attack_interval = 1;
    int num_attackers_per_round = 0;
};

/// global + factor * (local - global).
ParameterVector scale_update(const ParameterVector& global, const ParameterVector& local,
                             double factor);

/// Radial projection of `candidate` onto the L2 ball of `radius` around
/// `global`. Candidates inside the ball are returned unchanged (bitwise), so
/// the projection is exactly idempotent.
ParameterVector project_l2_ball(const ParameterVector& global, const ParameterVector& candidate,
                                double radius);

/// Splits the trigger coordinates into `partitions` disjoint contiguous
/// groups, one spec per group, all with the original target label.
std::vector<datakit::BackdoorSpec> dba_trigger_parts(const datakit::BackdoorSpec& spec,
                                                     int partitions);

/// Local training on the (already poisoned) shard, shaped by the attack:
/// PGD variants project onto the radius ball after every epoch and at the
/// end; model replacement scales the final update; none/dba train plainly.
ParameterVector craft_malicious_update(const ParameterVector& global,
                                       const learner::ModelSpec& spec,
                                       const datakit::Shard& poisoned_shard,
                                       const AttackSpec& attack, const learner::TrainConfig& cfg);

}  // namespace fedlab::attacks
