#include "fedlab/config.hpp"

#include <cmath>
#include <regex>

#include <nlohmann/json.hpp>

#include "fedlab/errors.hpp"

namespace fedlab::cli {

using nlohmann::json;

namespace {

/// Consumes keys from a JSON object and rejects leftovers, so typos never
/// pass silently.
class StrictObject {
public:
    StrictObject(const json& j, std::string path) : remaining_(j), path_(std::move(path)) {
        if (!remaining_.is_object()) {
            throw ValidationError("config: " + path_ + " must be an object");
        }
    }

    bool has(const char* key) const { return remaining_.contains(key); }

    template <typename T>
    T take(const char* key, T fallback) {
        if (!remaining_.contains(key)) return fallback;
        return extract<T>(key);
    }

    template <typename T>
    T require(const char* key) {
        if (!remaining_.contains(key)) {
            throw ValidationError("config: missing required key " + dotted(key));
        }
        return extract<T>(key);
    }

    json take_raw(const char* key) {
        json v = remaining_.at(key);
        remaining_.erase(key);
        return v;
    }

    void finish() const {
        if (!remaining_.empty()) {
            std::string keys;
            for (const auto& [k, v] : remaining_.items()) {
                if (!keys.empty()) keys += ", ";
                keys += dotted(k.c_str());
            }
            throw ValidationError("config: unknown key(s): " + keys);
        }
    }

    std::string dotted(const char* key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    template <typename T>
    T extract(const char* key) {
        try {
            T v = remaining_.at(key).get<T>();
            remaining_.erase(key);
            return v;
        } catch (const json::exception& e) {
            throw ValidationError("config: bad value for " + dotted(key) + ": " + e.what());
        }
    }

    json remaining_;
    std::string path_;
};

learner::TrainConfig parse_train(const json& j, const std::string& path,
                                 const learner::TrainConfig& defaults) {
    StrictObject o(j, path);
    learner::TrainConfig cfg = defaults;
    cfg.learning_rate = o.take("learning_rate", cfg.learning_rate);
    cfg.local_iterations = o.take("local_iterations", cfg.local_iterations);
    cfg.batch_size = o.take("batch_size", cfg.batch_size);
    o.finish();
    return cfg;
}

defenses::DefenseKind parse_defense_kind(const std::string& s) {
    using defenses::DefenseKind;
    if (s == "fedavg") return DefenseKind::fedavg;
    if (s == "multi_metrics") return DefenseKind::multi_metrics;
    if (s == "multi_metrics_maxnorm") return DefenseKind::multi_metrics_maxnorm;
    if (s == "multi_metrics_mean") return DefenseKind::multi_metrics_mean;
    if (s == "krum") return DefenseKind::krum;
    if (s == "multi_krum") return DefenseKind::multi_krum;
    if (s == "rfa") return DefenseKind::rfa;
    if (s == "foolsgold") return DefenseKind::foolsgold;
    if (s == "weak_dp") return DefenseKind::weak_dp;
    throw ValidationError("config: unknown defense.kind \"" + s + "\"");
}

attacks::AttackKind parse_attack_kind(const std::string& s) {
    using attacks::AttackKind;
    if (s == "none") return AttackKind::none;
    if (s == "model_replacement") return AttackKind::model_replacement;
    if (s == "dba") return AttackKind::dba;
    if (s == "pgd") return AttackKind::pgd;
    if (s == "edge_case_pgd") return AttackKind::edge_case_pgd;
    throw ValidationError("config: unknown attack.kind \"" + s + "\"");
}

const char* to_string(attacks::AttackKind kind) {
    switch (kind) {
        case attacks::AttackKind::none: return "none";
        case attacks::AttackKind::model_replacement: return "model_replacement";
        case attacks::AttackKind::dba: return "dba";
        case attacks::AttackKind::pgd: return "pgd";
        case attacks::AttackKind::edge_case_pgd: return "edge_case_pgd";
    }
    return "unknown";
}

datakit::BackdoorSpec parse_backdoor(const json& j, const std::string& path) {
    StrictObject o(j, path);
    datakit::BackdoorSpec spec;
    const std::string kind = o.take<std::string>("kind", "pixel_trigger");
    if (kind == "pixel_trigger") {
        spec.kind = datakit::BackdoorKind::pixel_trigger;
    } else if (kind == "edge_case") {
        spec.kind = datakit::BackdoorKind::edge_case;
    } else {
        throw ValidationError("config: unknown " + path + ".kind \"" + kind + "\"");
    }
    spec.target_label = o.take("target_label", spec.target_label);
    if (o.has("trigger_coords")) {
        const json coords = o.take_raw("trigger_coords");
        if (!coords.is_array()) throw ValidationError("config: " + path + ".trigger_coords must be an array");
        for (const auto& c : coords) {
            if (!c.is_array() || c.size() != 2) {
                throw ValidationError("config: " + path +
                                      ".trigger_coords entries must be [index, value] pairs");
            }
            spec.trigger_coords.emplace_back(c.at(0).get<std::size_t>(), c.at(1).get<double>());
        }
    }
    spec.edge_center = o.take("edge_center", spec.edge_center);
    spec.edge_radius = o.take("edge_radius", spec.edge_radius);
    spec.poison_fraction = o.take("poison_fraction", spec.poison_fraction);
    o.finish();
    return spec;
}

}  // namespace

sim::FederationConfig parse_config(const json& j) {
    StrictObject o(j, "");
    sim::FederationConfig cfg;
    cfg.total_clients = o.take("total_clients", cfg.total_clients);
    cfg.clients_per_round = o.take("clients_per_round", cfg.clients_per_round);
    cfg.num_rounds = o.take("num_rounds", cfg.num_rounds);
    cfg.attackers_per_round = o.take("attackers_per_round", cfg.attackers_per_round);
    cfg.attack_interval = o.take("attack_interval", cfg.attack_interval);
    cfg.dirichlet_alpha = o.take("dirichlet_alpha", cfg.dirichlet_alpha);
    cfg.seed = o.take("seed", cfg.seed);

    if (o.has("data")) {
        StrictObject od(o.take_raw("data"), "data");
        auto& d = cfg.data;
        d.num_classes = od.take("num_classes", d.num_classes);
        d.samples_per_class = od.take("samples_per_class", d.samples_per_class);
        d.feature_dim = od.take("feature_dim", d.feature_dim);
        d.class_separation = od.take("class_separation", d.class_separation);
        d.test_samples_per_class = od.take("test_samples_per_class", d.test_samples_per_class);
        d.backdoor_test_size = od.take("backdoor_test_size", d.backdoor_test_size);
        d.benign_trigger_fraction = od.take("benign_trigger_fraction", d.benign_trigger_fraction);
        od.finish();
    }

    if (o.has("model")) {
        StrictObject om(o.take_raw("model"), "model");
        cfg.model.hidden_dim = om.take("hidden_dim", 32);
        om.finish();
    } else {
        cfg.model.hidden_dim = 32;
    }

    learner::TrainConfig train_defaults;
    train_defaults.learning_rate = 0.1;
    train_defaults.local_iterations = 2;
    train_defaults.batch_size = 16;
    cfg.benign_train = o.has("benign_train")
                           ? parse_train(o.take_raw("benign_train"), "benign_train", train_defaults)
                           : train_defaults;
    cfg.attacker_train = o.has("attacker_train")
                             ? parse_train(o.take_raw("attacker_train"), "attacker_train",
                                           cfg.benign_train)
                             : cfg.benign_train;

    {
        if (!o.has("defense")) throw ValidationError("config: missing required key defense.kind");
        StrictObject od(o.take_raw("defense"), "defense");
        auto& ds = cfg.defense;
        ds.kind = parse_defense_kind(od.require<std::string>("kind"));
        ds.p = od.take("p", ds.p);
        ds.f = od.take("f", ds.f);
        ds.clip_threshold = od.take("clip_threshold", ds.clip_threshold);
        ds.noise_sigma = od.take("noise_sigma", ds.noise_sigma);
        ds.rfa_smoothing = od.take("rfa_smoothing", ds.rfa_smoothing);
        ds.rfa_tolerance = od.take("rfa_tolerance", ds.rfa_tolerance);
        ds.rfa_max_iters = od.take("rfa_max_iters", ds.rfa_max_iters);
        ds.eta = od.take("eta", ds.eta);
        ds.center_covariance = od.take("center_covariance", ds.center_covariance);
        od.finish();
    }

    {
        if (!o.has("attack")) throw ValidationError("config: missing required key attack.kind");
        StrictObject oa(o.take_raw("attack"), "attack");
        auto& as = cfg.attack;
        as.kind = parse_attack_kind(oa.require<std::string>("kind"));
        as.scale_factor = oa.take("scale_factor", 0.0);  // 0 = auto (N/K)
        as.pgd_radius = oa.take("pgd_radius", as.pgd_radius);
        as.dba_partitions = oa.take("dba_partitions", as.dba_partitions);
        if (oa.has("backdoor")) {
            as.backdoor = parse_backdoor(oa.take_raw("backdoor"), "attack.backdoor");
        }
        oa.finish();
    }

    o.finish();
    return cfg;
}

void resolve_config(sim::FederationConfig& cfg) {
    cfg.model.input_dim = cfg.data.feature_dim;
    cfg.model.num_classes = cfg.data.num_classes;

    if (cfg.attack.scale_factor <= 0.0) {
        cfg.attack.scale_factor =
            cfg.attack.kind == attacks::AttackKind::model_replacement
                ? static_cast<double>(cfg.total_clients) / static_cast<double>(cfg.clients_per_round)
                : 1.0;
    }
    if (cfg.attack.backdoor.kind == datakit::BackdoorKind::edge_case &&
        cfg.attack.backdoor.edge_center.empty()) {
        // Tail cluster along the class-0 mean direction, three times as far
        // out: well clear of every class blob, and a region the clean model
        // maps away from the usual target label.
        cfg.attack.backdoor.edge_center = datakit::synthetic_class_mean(
            0, cfg.data.feature_dim, 3.0 * cfg.data.class_separation);
    }
    cfg.attack.attack_interval = cfg.attack_interval;
    cfg.attack.num_attackers_per_round = cfg.attackers_per_round;

    sim::validate(cfg);
}

json config_to_json(const sim::FederationConfig& cfg) {
    json j;
    j["total_clients"] = cfg.total_clients;
    j["clients_per_round"] = cfg.clients_per_round;
    j["num_rounds"] = cfg.num_rounds;
    j["attackers_per_round"] = cfg.attackers_per_round;
    j["attack_interval"] = cfg.attack_interval;
    j["dirichlet_alpha"] = cfg.dirichlet_alpha;
    j["seed"] = cfg.seed;
    j["data"] = {{"num_classes", cfg.data.num_classes},
                 {"samples_per_class", cfg.data.samples_per_class},
                 {"feature_dim", cfg.data.feature_dim},
                 {"class_separation", cfg.data.class_separation},
                 {"test_samples_per_class", cfg.data.test_samples_per_class},
                 {"backdoor_test_size", cfg.data.backdoor_test_size},
                 {"benign_trigger_fraction", cfg.data.benign_trigger_fraction}};
    j["model"] = {{"hidden_dim", cfg.model.hidden_dim}};
    j["benign_train"] = {{"learning_rate", cfg.benign_train.learning_rate},
                         {"local_iterations", cfg.benign_train.local_iterations},
                         {"batch_size", cfg.benign_train.batch_size}};
    j["attacker_train"] = {{"learning_rate", cfg.attacker_train.learning_rate},
                           {"local_iterations", cfg.attacker_train.local_iterations},
                           {"batch_size", cfg.attacker_train.batch_size}};
    j["defense"] = {{"kind", defenses::to_string(cfg.defense.kind)},
                    {"p", cfg.defense.p},
                    {"f", cfg.defense.f},
                    {"clip_threshold", cfg.defense.clip_threshold},
                    {"noise_sigma", cfg.defense.noise_sigma},
                    {"rfa_smoothing", cfg.defense.rfa_smoothing},
                    {"rfa_tolerance", cfg.defense.rfa_tolerance},
                    {"rfa_max_iters", cfg.defense.rfa_max_iters},
                    {"eta", cfg.defense.eta},
                    {"center_covariance", cfg.defense.center_covariance}};
    json coords = json::array();
    for (const auto& [idx, value] : cfg.attack.backdoor.trigger_coords) {
        coords.push_back(json::array({idx, value}));
    }
    j["attack"] = {{"kind", to_string(cfg.attack.kind)},
                   {"scale_factor", cfg.attack.scale_factor},
                   {"pgd_radius", cfg.attack.pgd_radius},
                   {"dba_partitions", cfg.attack.dba_partitions},
                   {"backdoor",
                    {{"kind", cfg.attack.backdoor.kind == datakit::BackdoorKind::pixel_trigger
                                  ? "pixel_trigger"
                                  : "edge_case"},
                     {"target_label", cfg.attack.backdoor.target_label},
                     {"trigger_coords", coords},
                     {"edge_center", cfg.attack.backdoor.edge_center},
                     {"edge_radius", cfg.attack.backdoor.edge_radius},
                     {"poison_fraction", cfg.attack.backdoor.poison_fraction}}}};
    return j;
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError("override must look like key.path=value: " + assignment);
    }
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const std::size_t dotpos = path.find('.', start);
        const std::string key = path.substr(start, dotpos - start);
        if (key.empty()) throw ValidationError("override has an empty path segment: " + assignment);
        if (dotpos == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        start = dotpos + 1;
    }
}

std::vector<double> parse_sweep_values(const std::string& value) {
    static const std::regex sweep_re(
        R"(^\s*([-+0-9.eE]+)\.\.([-+0-9.eE]+)\s+step\s+([-+0-9.eE]+)\s*$)");
    std::smatch m;
    if (!std::regex_match(value, m, sweep_re)) return {};
    const double lo = std::stod(m[1]);
    const double hi = std::stod(m[2]);
    const double step = std::stod(m[3]);
    if (step <= 0.0 || hi < lo) {
        throw ValidationError("bad sweep range: " + value);
    }
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-9 * step; v += step) out.push_back(v);
    return out;
}

}  // namespace fedlab::cli
