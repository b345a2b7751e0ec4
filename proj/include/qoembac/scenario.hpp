#pragma once

#include "qoembac/simlink.hpp"
#include "qoembac/traffic.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qoembac {

/// One simulation of a scenario: a policy plus, for Pro-IBMAC, its beta source.
struct RunVariant {
    std::string label;
    Policy policy = Policy::none;
    BetaSource beta = 1.0;
    std::string beta_label;  // fixed value or preset name; empty for other policies
};

/// A named experiment: link and traffic settings shared by every run variant, which all
/// see the same arrival schedule.
struct Scenario {
    std::string name;
    SimConfig base;  // arrivals filled, policy/beta set per run
    std::vector<RunVariant> runs;
};

/// Parses an INI-style scenario file: one `[section]` per scenario, `key = value` pairs,
/// and an optional `[defaults]` section inherited by every scenario. Trace paths resolve
/// relative to the file. Throws ConfigError.
std::vector<Scenario> load_scenarios(const std::filesystem::path& file,
                                     std::optional<std::uint64_t> seed_override = std::nullopt);

struct RunResult {
    RunVariant variant;
    SimReport report;
};

struct ScenarioResult {
    std::string name;
    double capacity = 0.0;
    std::vector<RunResult> runs;
};

/// Runs every variant; `jobs` > 1 runs variants concurrently. Results keep variant order.
ScenarioResult run_scenario(const Scenario& scenario, unsigned jobs = 1);

struct BundleOptions {
    bool packets_csv = false;
    std::size_t cdf_points = 20;
};

/// Writes admissions.csv, rates.csv, summary.csv, qoe.csv, delay_cdf.csv (and packets.csv
/// when asked) into `dir`.
void write_bundle(const ScenarioResult& result, const std::filesystem::path& dir,
                  const BundleOptions& options = {});

/// Column names of summary.csv.
const std::vector<std::string>& summary_header();
/// One summary row per run.
std::vector<std::vector<std::string>> summary_rows(const ScenarioResult& result);

}  // namespace qoembac
