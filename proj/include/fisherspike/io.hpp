#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fisherspike/simulate.hpp"

namespace fisherspike {

/// Parses a measure spec "t:w[,t:w...]" (e.g. "2:0.5,1:0.5"). Atoms may be
/// given in any order. Weights are auto-normalized when their sum is within
/// 1% of 1, otherwise the spec is rejected.
SpectralMeasure parse_measure_spec(const std::string& spec);

/// Parses a labeled rank group "label=r1[,r2...]" with 1-based ranks.
std::pair<std::string, std::vector<int>> parse_rank_group(const std::string& spec);

/// Parses a comma-separated list of positive reals.
std::vector<double> parse_double_list(const std::string& spec);

/// Loads an eigenvalue file (plain text, one nonnegative real per line,
/// descending order enforced) into an EigenSample.
EigenSample load_eigen_sample(const std::string& path, int n1, int n2);

/// Writes eigenvalues one per line, full precision, to the format
/// load_eigen_sample reads.
void save_eigenvalues(const std::string& path, const std::vector<double>& values);

/// Reads a SimulationConfig from a JSON file. Recognized keys: p, n1, n2,
/// dist, reps, seed, rho, exclusion_ratio, workers, lambda_head,
/// lambda_tail, out_dir, spikes (array of {label, value, ranks}).
SimulationConfig load_simulation_config(const std::string& path);

}  // namespace fisherspike
