#include "fedlab/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "fedlab/errors.hpp"
#include "fedlab/rng.hpp"

namespace fedlab::sim {

namespace {

// Seed-derivation tags; arbitrary distinct constants.
constexpr std::uint64_t kTagDataset = 0xDA7A'0001;
constexpr std::uint64_t kTagTestset = 0xDA7A'0002;
constexpr std::uint64_t kTagPartition = 0xDA7A'0003;
constexpr std::uint64_t kTagBackdoorTest = 0xDA7A'0004;
constexpr std::uint64_t kTagInit = 0xDA7A'0005;
constexpr std::uint64_t kTagPoison = 0xDA7A'0006;
constexpr std::uint64_t kTagSampling = 0x5A3'0001;
constexpr std::uint64_t kTagNoise = 0x5A3'0002;
constexpr std::uint64_t kTagBenignStamp = 0x5A3'0003;

}  // namespace

void validate(const FederationConfig& cfg) {
    if (cfg.total_clients < 1) throw ValidationError("total_clients must be >= 1");
    if (cfg.clients_per_round < 1 || cfg.clients_per_round > cfg.total_clients) {
        throw ValidationError("clients_per_round must be in [1, total_clients]");
    }
    if (cfg.num_rounds < 1) throw ValidationError("num_rounds must be >= 1");
    if (cfg.attackers_per_round < 0 || cfg.attackers_per_round > cfg.clients_per_round) {
        throw ValidationError("attackers_per_round must be in [0, clients_per_round]");
    }
    if (cfg.attack_interval < 1) throw ValidationError("attack_interval must be >= 1");
    if (cfg.dirichlet_alpha <= 0.0) throw ValidationError("dirichlet_alpha must be positive");

    using defenses::DefenseKind;
    const DefenseKind dk = cfg.defense.kind;
    if ((dk == DefenseKind::multi_metrics || dk == DefenseKind::multi_metrics_maxnorm ||
         dk == DefenseKind::multi_metrics_mean) &&
        cfg.clients_per_round <= 3) {
        throw ValidationError("multi-metrics defenses require clients_per_round > 3");
    }
}

bool is_attack_round(const FederationConfig& cfg, int round) {
    return cfg.attack.kind != attacks::AttackKind::none && cfg.attackers_per_round > 0 &&
           round % cfg.attack_interval == 0;
}

std::vector<int> sample_round_clients(const FederationConfig& cfg, int round) {
    auto gen = rng::engine(rng::mix(cfg.seed, kTagSampling, static_cast<std::uint64_t>(round)));
    const int n = cfg.total_clients;
    const int k = cfg.clients_per_round;
    const int reserved = is_attack_round(cfg, round) ? cfg.attackers_per_round : 0;

    // Partial Fisher-Yates over the non-reserved pool.
    std::vector<int> pool;
    pool.reserve(static_cast<std::size_t>(n - reserved));
    for (int i = reserved; i < n; ++i) pool.push_back(i);

    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < reserved; ++i) out.push_back(i);
    for (int i = 0; i < k - reserved; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                        pool.size() - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[pick(gen)]);
        out.push_back(pool[static_cast<std::size_t>(i)]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<RoundReport> run_federation(const FederationConfig& cfg) {
    validate(cfg);
    const auto& d = cfg.data;

    learner::ModelSpec model = cfg.model;
    model.input_dim = d.feature_dim;
    model.num_classes = d.num_classes;

    const std::vector<datakit::Sample> dataset = datakit::make_synthetic_dataset(
        d.num_classes, d.samples_per_class, d.feature_dim, d.class_separation,
        rng::mix(cfg.seed, kTagDataset));
    const std::vector<datakit::Sample> clean_test = datakit::make_synthetic_dataset(
        d.num_classes, d.test_samples_per_class, d.feature_dim, d.class_separation,
        rng::mix(cfg.seed, kTagTestset));
    const std::vector<datakit::Sample> backdoor_test =
        datakit::make_backdoor_testset(cfg.attack.backdoor, clean_test, d.backdoor_test_size,
                                       rng::mix(cfg.seed, kTagBackdoorTest));

    std::vector<datakit::Shard> shards = datakit::dirichlet_partition(
        dataset, cfg.total_clients, cfg.dirichlet_alpha, rng::mix(cfg.seed, kTagPartition));

    // Clients 0..A-1 are the designated attackers; their shards carry the
    // backdoor for the whole run.
    const int num_attackers =
        cfg.attack.kind == attacks::AttackKind::none ? 0 : cfg.attackers_per_round;
    std::vector<attacks::AttackSpec> attacker_specs(static_cast<std::size_t>(num_attackers),
                                                    cfg.attack);
    if (num_attackers > 0) {
        if (cfg.attack.kind == attacks::AttackKind::dba) {
            const auto parts =
                attacks::dba_trigger_parts(cfg.attack.backdoor, cfg.attack.dba_partitions);
            for (int a = 0; a < num_attackers; ++a) {
                attacker_specs[static_cast<std::size_t>(a)].backdoor =
                    parts[static_cast<std::size_t>(a) % parts.size()];
            }
        }
        for (int a = 0; a < num_attackers; ++a) {
            shards[static_cast<std::size_t>(a)] = datakit::inject_backdoor(
                shards[static_cast<std::size_t>(a)],
                attacker_specs[static_cast<std::size_t>(a)].backdoor,
                rng::mix(cfg.seed, kTagPoison, static_cast<std::uint64_t>(a)));
        }
        // Optionally hand benign clients correctly-labeled trigger samples.
        if (d.benign_trigger_fraction > 0.0 &&
            cfg.attack.backdoor.kind == datakit::BackdoorKind::pixel_trigger) {
            for (int c = num_attackers; c < cfg.total_clients; ++c) {
                auto& shard = shards[static_cast<std::size_t>(c)];
                auto gen = rng::engine(
                    rng::mix(cfg.seed, kTagBenignStamp, static_cast<std::uint64_t>(c)));
                std::vector<std::size_t> idx(shard.samples.size());
                std::iota(idx.begin(), idx.end(), 0);
                std::shuffle(idx.begin(), idx.end(), gen);
                const auto count = static_cast<std::size_t>(
                    std::ceil(d.benign_trigger_fraction *
                              static_cast<double>(shard.samples.size())));
                for (std::size_t i = 0; i < std::min(count, idx.size()); ++i) {
                    datakit::apply_trigger(shard.samples[idx[i]], cfg.attack.backdoor);
                }
            }
        }
    }

    ParameterVector global = learner::init_model(model, rng::mix(cfg.seed, kTagInit));
    defenses::DefenseContext ctx;

    std::vector<RoundReport> reports;
    reports.reserve(static_cast<std::size_t>(cfg.num_rounds));
    for (int t = 1; t <= cfg.num_rounds; ++t) {
        const bool attacked = is_attack_round(cfg, t);
        const std::vector<int> roster = sample_round_clients(cfg, t);

        std::vector<defenses::ClientUpdate> updates;
        updates.reserve(roster.size());
        try {
            for (int id : roster) {
                const auto& shard = shards[static_cast<std::size_t>(id)];
                const bool is_attacker = attacked && id < num_attackers;
                learner::TrainConfig tc = is_attacker ? cfg.attacker_train : cfg.benign_train;
                tc.seed = rng::mix(cfg.seed, static_cast<std::uint64_t>(t),
                                   static_cast<std::uint64_t>(id));
                ParameterVector local =
                    is_attacker
                        ? attacks::craft_malicious_update(
                              global, model, shard, attacker_specs[static_cast<std::size_t>(id)], tc)
                        : learner::train_local(global, model, shard, tc);
                updates.push_back({id, std::move(local), static_cast<int>(shard.samples.size())});
            }

            ctx.round_seed = rng::mix(cfg.seed, kTagNoise, static_cast<std::uint64_t>(t));
            defenses::AggregationResult agg =
                defenses::aggregate(global, updates, cfg.defense, ctx);
            global = std::move(agg.model);

            RoundReport report;
            report.round = t;
            report.attacked = attacked;
            report.ma = learner::evaluate(global, model, clean_test);
            report.ba = learner::evaluate(global, model, backdoor_test);
            report.selected_ids = std::move(agg.selected_ids);
            report.scores = std::move(agg.scores);
            report.dominant_metric = std::move(agg.dominant_metric);
            reports.push_back(std::move(report));
        } catch (const std::exception& e) {
            throw InfeasibilityError("round " + std::to_string(t) + ": " + e.what());
        }
    }
    return reports;
}

std::vector<RelativeScore> relative_scores(const std::vector<AttackOutcome>& method,
                                           const std::vector<AttackOutcome>& baseline) {
    if (method.size() != baseline.size() || method.empty()) {
        throw StructuralError("ranking requires aligned, nonempty outcome lists");
    }
    std::vector<RelativeScore> out;
    out.reserve(method.size());
    for (std::size_t i = 0; i < method.size(); ++i) {
        if (baseline[i].ma == 0.0 || baseline[i].ba == 0.0) {
            throw UndefinedScoreError("ranking score undefined: baseline MA/BA is zero for attack #" +
                                      std::to_string(i));
        }
        out.push_back({(method[i].ma - baseline[i].ma) / baseline[i].ma,
                       (method[i].ba - baseline[i].ba) / baseline[i].ba});
    }
    return out;
}

double ranking_score(const std::vector<AttackOutcome>& method,
                     const std::vector<AttackOutcome>& baseline) {
    double total = 0.0;
    for (const auto& s : relative_scores(method, baseline)) {
        total += s.ma_score - s.ba_score;
    }
    return total;
}

}  // namespace fedlab::sim
