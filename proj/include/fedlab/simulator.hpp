#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedlab/attacks.hpp"
#include "fedlab/datakit.hpp"
#include "fedlab/defenses.hpp"
#include "fedlab/learner.hpp"

namespace fedlab::sim {

/// Synthetic-task shape: class blobs, clean test set, backdoor test set.
struct DataConfig {
    int num_classes = 3;
    int samples_per_class = 200;
    int feature_dim = 20;
    double class_separation = 6.0;
    int test_samples_per_class = 200;
    int backdoor_test_size = 200;
    /// Fraction of each benign shard stamped with the trigger but correctly
    /// labeled (the non-edge-case convention); 0 disables.
    double benign_trigger_fraction = 0.0;
};

struct FederationConfig {
    int total_clients = 40;       // N
    int clients_per_round = 10;   // K
    int num_rounds = 60;          // T
    int attackers_per_round = 0;
    int attack_interval = 1;
    double dirichlet_alpha = 0.5;
    DataConfig data;
    learner::ModelSpec model;  // input_dim / num_classes filled from data during validation
    learner::TrainConfig benign_train;
    learner::TrainConfig attacker_train;
    defenses::DefenseSpec defense;
    attacks::AttackSpec attack;
    std::uint64_t seed = 1;
};

struct RoundReport {
    int round = 0;
    double ma = 0.0;
    double ba = 0.0;
    bool attacked = false;
    std::vector<int> selected_ids;
    std::vector<double> scores;
    std::string dominant_metric = "n/a";
};

/// Throws ValidationError when the config invariants do not hold.
void validate(const FederationConfig& cfg);

/// Whether round t (1-based) is on the attack schedule for this config.
bool is_attack_round(const FederationConfig& cfg, int round);

/// The round's participating client ids, ascending. Attack rounds reserve the
/// first attackers_per_round ids (clients 0..A-1) and fill the rest uniformly
/// without replacement from the benign pool; other rounds sample uniformly
/// from everyone. Deterministic in (cfg.seed, round).
std::vector<int> sample_round_clients(const FederationConfig& cfg, int round);

/// The full federated loop: data build, Dirichlet partition, attacker shard
/// poisoning, per-round local training / attack crafting, defense
/// aggregation, MA/BA evaluation. Deterministic in cfg.seed.
std::vector<RoundReport> run_federation(const FederationConfig& cfg);

/// (MA, BA) of one method under one attack.
struct AttackOutcome {
    double ma = 0.0;
    double ba = 0.0;
};

/// Relative improvement of one method over the baseline for one attack:
/// (K - B) / B per metric.
struct RelativeScore {
    double ma_score = 0.0;
    double ba_score = 0.0;
};

/// Per-attack relative scores; both lists must align and every baseline
/// entry must be nonzero (UndefinedScoreError otherwise).
std::vector<RelativeScore> relative_scores(const std::vector<AttackOutcome>& method,
                                           const std::vector<AttackOutcome>& baseline);

/// Sum over attacks of (ma_score - ba_score).
double ranking_score(const std::vector<AttackOutcome>& method,
                     const std::vector<AttackOutcome>& baseline);

}  // namespace fedlab::sim
