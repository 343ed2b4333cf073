#include "fedlab/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fedlab/config.hpp"
#include "fedlab/errors.hpp"

namespace fedlab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

namespace {

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::trunc | std::ios::binary);
        if (!f) throw InfeasibilityError("cannot open " + tmp.string() + " for writing");
        f << content;
    }
    fs::rename(tmp, path);
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open config file: " + path);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse error in " + path + ": " + e.what());
    }
}

std::string summary_to_json(const std::vector<sim::RoundReport>& reports) {
    json j;
    j["rounds"] = reports.size();
    j["final_ma"] = reports.back().ma;
    j["final_ba"] = reports.back().ba;
    const std::size_t tail = std::min<std::size_t>(10, reports.size());
    double ba_sum = 0.0;
    for (std::size_t i = reports.size() - tail; i < reports.size(); ++i) ba_sum += reports[i].ba;
    j["mean_ba_last_10"] = ba_sum / static_cast<double>(tail);

    std::map<std::string, int> dominance;
    for (const auto& r : reports) dominance[r.dominant_metric]++;
    json freq = json::object();
    for (const auto& [metric, count] : dominance) {
        freq[metric] = static_cast<double>(count) / static_cast<double>(reports.size());
    }
    j["dominant_metric_frequency"] = freq;
    j["rounds_csv"] = "rounds.csv";
    j["config"] = "config.json";
    return j.dump(2) + "\n";
}

RunArtifacts execute_one(const json& raw, const fs::path& dir) {
    sim::FederationConfig cfg = parse_config(raw);
    resolve_config(cfg);
    const std::vector<sim::RoundReport> reports = sim::run_federation(cfg);

    fs::create_directories(dir);
    RunArtifacts art;
    art.rounds_csv_path = dir / "rounds.csv";
    art.summary_json_path = dir / "summary.json";
    art.config_echo_path = dir / "config.json";
    write_atomic(art.rounds_csv_path, rounds_to_csv(reports));
    write_atomic(art.summary_json_path, summary_to_json(reports));
    write_atomic(art.config_echo_path, config_to_json(cfg).dump(2) + "\n");
    return art;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

std::string rounds_to_csv(const std::vector<sim::RoundReport>& reports) {
    std::string out = "round,attacked,ma,ba,selected_ids,dominant_metric\n";
    for (const auto& r : reports) {
        out += std::to_string(r.round);
        out += r.attacked ? ",1," : ",0,";
        out += format_number(r.ma);
        out += ",";
        out += format_number(r.ba);
        out += ",";
        for (std::size_t i = 0; i < r.selected_ids.size(); ++i) {
            if (i > 0) out += ";";
            out += std::to_string(r.selected_ids[i]);
        }
        out += ",";
        out += r.dominant_metric;
        out += "\n";
    }
    return out;
}

std::vector<RunArtifacts> cmd_run(const std::string& config_file,
                                  const std::vector<std::string>& overrides,
                                  const std::string& out_dir) {
    json base = load_json_file(config_file);

    // Split overrides into scalars (applied once) and sweeps (expanded).
    struct Sweep {
        std::string key;
        std::vector<double> values;
    };
    std::vector<Sweep> sweeps;
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ValidationError("override must look like key.path=value: " + ov);
        }
        const std::vector<double> values = parse_sweep_values(ov.substr(eq + 1));
        if (values.empty()) {
            apply_override(base, ov);
        } else {
            sweeps.push_back({ov.substr(0, eq), values});
        }
    }

    std::vector<RunArtifacts> artifacts;
    if (sweeps.empty()) {
        artifacts.push_back(execute_one(base, out_dir));
        return artifacts;
    }

    // Cartesian product over swept keys, one subdirectory per combination.
    std::vector<std::size_t> index(sweeps.size(), 0);
    while (true) {
        json combo = base;
        std::string label;
        for (std::size_t s = 0; s < sweeps.size(); ++s) {
            const double v = sweeps[s].values[index[s]];
            apply_override(combo, sweeps[s].key + "=" + format_number(v));
            if (!label.empty()) label += "_";
            label += sweeps[s].key + "=" + format_number(v);
        }
        artifacts.push_back(execute_one(combo, fs::path(out_dir) / label));

        std::size_t pos = 0;
        while (pos < sweeps.size()) {
            if (++index[pos] < sweeps[pos].values.size()) break;
            index[pos] = 0;
            ++pos;
        }
        if (pos == sweeps.size()) break;
    }
    return artifacts;
}

void cmd_contrast(const std::vector<int>& dims, int points, int trials, std::uint64_t seed,
                  const std::string& out_file) {
    const auto report = vecmath::relative_contrast(dims, points, trials, seed);
    std::string out = "d,l1_contrast,l2_contrast,m_over_u_rootd\n";
    for (std::size_t i = 0; i < report.dims.size(); ++i) {
        out += std::to_string(report.dims[i]) + "," + format_number(report.l1_contrast[i]) + "," +
               format_number(report.l2_contrast[i]) + "," +
               format_number(report.m_over_u_rootd[i]) + "\n";
    }
    write_atomic(out_file, out);
}

std::vector<RankEntry> cmd_rank(const std::string& results_file, const std::string& baseline_name,
                                const std::string& out_file) {
    std::ifstream f(results_file);
    if (!f) throw ValidationError("cannot open results file: " + results_file);

    std::string line;
    if (!std::getline(f, line)) throw ValidationError("results file is empty");
    {
        const auto header = split_csv_line(line);
        if (header != std::vector<std::string>{"method", "attack", "ma", "ba"}) {
            throw ValidationError("results file must start with header method,attack,ma,ba");
        }
    }

    // Preserve first-appearance order of methods and attacks.
    std::vector<std::string> methods, attack_names;
    std::map<std::string, std::map<std::string, sim::AttackOutcome>> table;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4) throw ValidationError("bad results row: " + line);
        const std::string& method = cells[0];
        const std::string& attack = cells[1];
        if (table.find(method) == table.end()) methods.push_back(method);
        if (std::find(attack_names.begin(), attack_names.end(), attack) == attack_names.end()) {
            attack_names.push_back(attack);
        }
        table[method][attack] = {std::stod(cells[2]), std::stod(cells[3])};
    }
    if (table.find(baseline_name) == table.end()) {
        throw ValidationError("baseline method \"" + baseline_name + "\" not found in " +
                              results_file);
    }

    std::vector<sim::AttackOutcome> baseline;
    for (const auto& a : attack_names) {
        const auto it = table[baseline_name].find(a);
        if (it == table[baseline_name].end()) {
            throw ValidationError("baseline \"" + baseline_name + "\" has no row for attack \"" +
                                  a + "\"");
        }
        baseline.push_back(it->second);
    }

    std::vector<RankEntry> entries;
    for (const auto& method : methods) {
        std::vector<sim::AttackOutcome> outcomes;
        for (const auto& a : attack_names) {
            const auto it = table[method].find(a);
            if (it == table[method].end()) {
                throw ValidationError("method \"" + method + "\" has no row for attack \"" + a +
                                      "\"");
            }
            outcomes.push_back(it->second);
        }
        RankEntry entry;
        entry.method = method;
        const auto scores = sim::relative_scores(outcomes, baseline);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            entry.per_attack.emplace_back(attack_names[i], scores[i]);
            entry.total += scores[i].ma_score - scores[i].ba_score;
        }
        entries.push_back(std::move(entry));
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const RankEntry& a, const RankEntry& b) { return a.total > b.total; });

    std::string out = "method,attack,score_ma,score_ba,score\n";
    for (const auto& e : entries) {
        for (const auto& [attack, s] : e.per_attack) {
            out += e.method + "," + attack + "," + format_number(s.ma_score) + "," +
                   format_number(s.ba_score) + "," + format_number(s.ma_score - s.ba_score) + "\n";
        }
        out += e.method + ",TOTAL,,," + format_number(e.total) + "\n";
    }
    write_atomic(out_file, out);
    return entries;
}

}  // namespace fedlab::cli
