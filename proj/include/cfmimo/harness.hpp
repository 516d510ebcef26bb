#pragma once

#include "cfmimo/assignment.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/power_control.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cfmimo {

enum class SweepVariable
{
    NumAps,
    NumUes,
    NumPilots,
};

std::string_view sweep_variable_name(SweepVariable v);
std::optional<SweepVariable> parse_sweep_variable(std::string_view name);

struct Sweep
{
    SweepVariable variable = SweepVariable::NumAps;
    std::vector<int> values;
};

struct ExperimentConfig
{
    SimConfig sim;
    std::vector<Strategy> strategies{Strategy::Random, Strategy::Greedy, Strategy::Repulsive, Strategy::Oracle};
    PowerPolicy power_policy = PowerPolicy::MaxMin;
    std::optional<Sweep> sweep;
    std::string output_path = "throughput.csv";
    int greedy_iterations = -1;
    unsigned threads = 0; ///< 0: hardware concurrency

    void validate() const;
};

/**
 * Reads `key = value` lines (`#` starts a comment, lists are comma
 * separated) on top of `base`. Unknown keys and malformed values throw
 * ConfigError.
 */
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path);

/// Applies one `key = value` setting; used by the file parser and CLI overrides.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

struct ThroughputRecord
{
    std::size_t realization = 0;
    std::string strategy;
    int ue = 0;
    double sinr = 0.0;
    double throughput_bps = 0.0;

    bool operator==(const ThroughputRecord&) const = default;
};

/**
 * Paired Monte Carlo run: every strategy sees the same realization for a
 * given index. Records are ordered by (realization, strategy order, ue)
 * independently of the thread schedule.
 */
std::vector<ThroughputRecord> run_experiment(const ExperimentConfig& cfg);

/// Nearest-rank percentile: the ceil(q N)-th smallest sample.
double percentile(std::vector<double> values, double q);

/// Sorted (value, fraction <= value) steps; the last fraction is 1.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

/// Largest vertical gap between two empirical CDFs.
double ks_distance(std::vector<double> a, std::vector<double> b);

inline constexpr const char* kCsvHeader = "realization,strategy,ue,sinr,throughput_bps";

void write_csv(std::ostream& out, const std::vector<ThroughputRecord>& records);
std::vector<ThroughputRecord> read_csv(std::istream& in);

struct StrategySummary
{
    std::string strategy;
    std::size_t samples = 0;
    double percentile_bps = 0.0;
    double mean_bps = 0.0;
};

/// Per-strategy percentile and mean, in first-appearance order.
std::vector<StrategySummary> summarize(const std::vector<ThroughputRecord>& records, double q);

/// Throughput samples of one strategy.
std::vector<double> throughput_of(const std::vector<ThroughputRecord>& records, const std::string& strategy);

struct SweepRow
{
    std::string variable;
    int value = 0;
    StrategySummary summary;
};

/// Runs the experiment once per sweep value; |values| x |strategies| rows.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, double q);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, double q);

} // namespace cfmimo
