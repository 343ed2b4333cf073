#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fedlab/simulator.hpp"

namespace fedlab::cli {

struct RunArtifacts {
    std::filesystem::path rounds_csv_path;
    std::filesystem::path summary_json_path;
    std::filesystem::path config_echo_path;
};

/// Loads the config file, applies --set overrides (ranges like
/// "0.1..0.7 step 0.2" expand into one run per value, cartesian across
/// swept keys), and executes each run into its own directory under out_dir.
/// All files are written temp-then-rename.
std::vector<RunArtifacts> cmd_run(const std::string& config_file,
                                  const std::vector<std::string>& overrides,
                                  const std::string& out_dir);

/// Relative-contrast experiment; writes columns
/// d,l1_contrast,l2_contrast,m_over_u_rootd.
void cmd_contrast(const std::vector<int>& dims, int points, int trials, std::uint64_t seed,
                  const std::string& out_file);

struct RankEntry {
    std::string method;
    double total = 0.0;
    std::vector<std::pair<std::string, sim::RelativeScore>> per_attack;
};

/// Reads a method,attack,ma,ba CSV, scores every method against the named
/// baseline, writes per-attack scores plus totals sorted descending, and
/// returns them.
std::vector<RankEntry> cmd_rank(const std::string& results_file, const std::string& baseline_name,
                                const std::string& out_file);

/// Round reports in the rounds.csv schema:
/// round,attacked,ma,ba,selected_ids,dominant_metric.
std::string rounds_to_csv(const std::vector<sim::RoundReport>& reports);

/// %.6g formatting used for every number in CSV output.
std::string format_number(double v);

}  // namespace fedlab::cli
