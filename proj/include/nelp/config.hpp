#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nelp/planted.hpp"
#include "nelp/sampling.hpp"
#include "nelp/solver.hpp"

namespace nelp {

/// Every tunable of a run. Parsed from `key = value` lines; unknown keys are
/// rejected so typos cannot silently fall back to defaults.
struct RunConfig {
  // Data files. Relative paths resolve against the config file's directory.
  std::string name = "dataset";
  std::string users;
  std::string positive;
  std::string authorship;
  std::string opinions;
  std::string truth;
  std::optional<std::int64_t> rating_threshold;

  std::uint64_t seed = 1;
  unsigned threads = 1;

  double c_p = 1.0;
  double c_n = 0.5;
  double c_b = 0.1;
  double closure_weight = 0.5;
  double ps_ratio = 10.0;
  sampling::WeightMode weight_mode = sampling::WeightMode::Reliability;
  solver::KernelKind kernel = solver::KernelKind::Linear;
  double rbf_bandwidth = 1.0;
  std::size_t max_unlabeled = 20000;
  double tolerance = 1e-5;
  std::size_t max_sweeps = 10000;

  int path_cap = 6;
  int k_max = 0;
  std::size_t min_pairs_per_k = 30;

  double random_rate = 0.5;
  std::vector<int> spath_lengths{2, 3};
  double missing_ratio = 20.0;
  std::vector<double> cb_values{0, 0.001, 0.01, 0.05, 0.1, 0.5, 1};

  io::PlantedParams planted;

  void validate() const;
  solver::Hyperparameters hyperparameters() const;
  sampling::SamplingConfig sampling_config() const;
};

/// Parses `key = value` lines; `#` starts a comment line.
RunConfig parse_config(std::string_view text, const std::string& source = "config");
/// Writes every key in a fixed order; parse_config inverts it exactly.
std::string to_string(const RunConfig& config);
/// Short stable hash of the serialized config, for report metadata.
std::string config_hash(const RunConfig& config);

}  // namespace nelp
