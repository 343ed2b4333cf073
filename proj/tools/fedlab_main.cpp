#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedlab/commands.hpp"
#include "fedlab/errors.hpp"

namespace {

std::vector<int> parse_dims(const std::string& csv) {
    std::vector<int> dims;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        dims.push_back(std::stoi(cell));
    }
    if (dims.empty()) throw fedlab::ValidationError("--dims must list at least one dimension");
    return dims;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedlab: federated-learning backdoor attack/defense simulation lab"};
    app.require_subcommand(1);

    // run
    std::string config_path, out_dir = "out";
    std::vector<std::string> overrides;
    bool seed_given = false;
    std::int64_t seed_flag = 0;
    auto* run = app.add_subcommand("run", "execute a federation experiment");
    run->add_option("--config", config_path, "config JSON file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed_flag, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_option("--set", overrides, "override config values, key.path=value (repeatable)");

    // contrast
    std::string dims_csv = "10,100,1000,10000", contrast_out = "contrast.csv";
    int points = 100, trials = 20;
    std::int64_t contrast_seed = 1;
    auto* contrast = app.add_subcommand("contrast", "relative-contrast experiment");
    contrast->add_option("--dims", dims_csv, "comma-separated dimensions");
    contrast->add_option("--points", points, "points per trial");
    contrast->add_option("--trials", trials, "trials per dimension");
    contrast->add_option("--seed", contrast_seed, "RNG seed");
    contrast->add_option("--out", contrast_out, "output CSV file");

    // rank
    std::string rank_input, rank_baseline = "fedavg", rank_out = "ranking.csv";
    auto* rank = app.add_subcommand("rank", "ranking scores from per-method MA/BA results");
    rank->add_option("--input", rank_input, "CSV with method,attack,ma,ba rows")->required();
    rank->add_option("--baseline", rank_baseline, "baseline method name");
    rank->add_option("--out", rank_out, "output CSV file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (seed_given) overrides.push_back("seed=" + std::to_string(seed_flag));
            const auto artifacts = fedlab::cli::cmd_run(config_path, overrides, out_dir);
            for (const auto& a : artifacts) {
                std::cout << "wrote " << a.rounds_csv_path.string() << "\n";
            }
        } else if (contrast->parsed()) {
            fedlab::cli::cmd_contrast(parse_dims(dims_csv), points, trials,
                                      static_cast<std::uint64_t>(contrast_seed), contrast_out);
            std::cout << "wrote " << contrast_out << "\n";
        } else if (rank->parsed()) {
            const auto entries = fedlab::cli::cmd_rank(rank_input, rank_baseline, rank_out);
            for (const auto& e : entries) {
                std::cout << e.method << " " << fedlab::cli::format_number(e.total) << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
