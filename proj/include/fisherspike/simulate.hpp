#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fisherspike/sampling.hpp"

namespace fisherspike {

/// One labeled spike with the sample ranks its estimator reads.
struct SpikeGroupConfig {
    std::string label;
    std::vector<int> ranks;
    std::optional<double> true_value;  // reporting metadata only
};

/// Full description of a Monte Carlo experiment.
///
/// Zero-valued n1/n2 and an empty spike list are filled by finalize() with
/// the simulation-study defaults: n1 = 2p, n2 = 4p, and the rank groups
/// a1 -> {1}, a2 -> {2,3}, a3 -> {p-2,p-1}, a4 -> {p}.
struct SimulationConfig {
    int p = 100;
    int n1 = 0;
    int n2 = 0;
    EntryDistribution dist = EntryDistribution::StandardNormal;
    int reps = 500;
    std::uint64_t master_seed = 0;
    double rho = 0.5;
    double exclusion_ratio = kDefaultExclusionRatio;
    std::vector<double> lambda_head = {10.0, 7.5, 7.5};
    std::vector<double> lambda_tail = {0.2, 0.2, 0.1};
    std::vector<SpikeGroupConfig> spikes;
    std::string out_dir;
    int workers = 0;  // 0 = hardware concurrency

    /// Fills defaults and validates; idempotent.
    void finalize();
};

/// Per-replication outputs.
struct ReplicationRecord {
    int rep = 0;
    std::uint64_t stream = 0;
    bool generated = false;                 // false if the draw itself failed
    std::string error;                      // set when generated == false
    std::vector<double> estimates;          // pooled estimate per spike group (NaN on failure)
    std::vector<std::string> estimate_errors;  // empty string per group on success
    std::vector<double> largest;            // top eigenvalues, descending
    std::vector<double> smallest;           // bottom eigenvalues, descending
};

struct Histogram {
    std::vector<double> edges;  // bin edges, size counts.size() + 1
    std::vector<int> counts;
};

struct SpikeAggregate {
    std::string label;
    std::optional<double> true_value;
    int count = 0;   // successful replications entering mean/sd
    double mean = 0.0;
    double sd = 0.0;
    Histogram histogram;
};

struct AggregateReport {
    SimulationConfig config;
    std::vector<SpikeAggregate> per_spike;
    std::vector<ReplicationRecord> records;  // sorted by rep index
    int successful_reps = 0;
};

/// Runs one replication: draws the Fisher sample on the stream derived
/// from (master_seed, rep) and estimates every configured spike group.
/// Per-group estimation errors are recorded in the record, not thrown.
ReplicationRecord run_replication(const SimulationConfig& config, int rep);

/// Same, with the population square root precomputed.
ReplicationRecord run_replication(const SimulationConfig& config, int rep,
                                  const Eigen::MatrixXd& sigma1_half);

/// Runs all replications (in parallel up to config.workers) and aggregates.
/// The aggregate is a deterministic function of (config, master_seed),
/// independent of worker count and scheduling order. Writes CSV artifacts
/// when config.out_dir is nonempty. Throws only if every replication fails.
AggregateReport run_monte_carlo(const SimulationConfig& config);

/// Writes summary.csv, histogram_<label>.csv per spike and replications.csv
/// under `dir` (created if missing). All files are UTF-8 with headers,
/// '.' decimal separator, full double precision, deterministic row order.
void write_report(const AggregateReport& report, const std::string& dir);

/// Number of histogram bins used by the aggregation (equal width over
/// mean +/- 4 sd).
inline constexpr int kHistogramBins = 40;

}  // namespace fisherspike
