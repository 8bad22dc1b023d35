#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nelp/graph.hpp"

namespace nelp::analysis {

/// Shortest-path lengths of enemy pairs in the positive network.
struct PathLengthHistogram {
  int cap = 6;
  /// counts[k] is the number of pairs at distance k + 1, k < cap.
  std::vector<std::size_t> counts;
  std::size_t beyond_cap = 0;
  std::size_t unreachable = 0;

  std::size_t total() const;
  /// Ratios in bucket order 1..cap, beyond cap, unreachable.
  std::vector<double> ratios() const;
  /// Fraction of pairs with finite length <= hops.
  double within(int hops) const;
};

PathLengthHistogram enemy_path_distribution(const PositiveNetwork& g_p, std::span<const Pair> negatives,
                                            int cap = 6);

struct TriadReport {
  std::size_t total = 0;
  /// Indexed by the number of negative links: (+,+,+), (+,+,-), (+,-,-), (-,-,-).
  std::array<std::size_t, 4> by_negatives{};
  std::size_t conflicting_pairs = 0;
  std::optional<double> balanced_ratio;
  std::size_t directed_total = 0;
  std::size_t status_satisfied = 0;
  std::optional<double> status_ratio;
};

TriadReport triad_census(const SignedNetwork& g);

struct TTestResult {
  double t = 0.0;
  double degrees_of_freedom = 0.0;
  /// One-sided p-value for H1: mean(s) > mean(r).
  double p_one_sided = 0.0;
};

/// Welch's unequal-variance two-sample t-test. Throws when either sample has
/// fewer than 2 values or both are constant with equal means. Two constant
/// samples with different means give t = +/-inf.
TTestResult welch_t_test(std::span<const double> s, std::span<const double> r);

struct CorrelationReport {
  std::size_t interacting_pairs = 0;
  std::vector<double> s;
  std::vector<double> r;
  TTestResult test;
  double alpha = 0.01;
  bool significant = false;
  /// ratio_curve[k] is the negative-link ratio among pairs with >= k + 1
  /// negative interactions; qualifying[k] is that pair count.
  std::vector<double> ratio_curve;
  std::vector<std::size_t> qualifying;
  double random_baseline = 0.0;
};

struct CorrelationOptions {
  std::uint64_t seed = 0;
  /// 0 selects the largest K with at least `min_pairs_per_k` qualifying pairs.
  int k_max = 0;
  std::size_t min_pairs_per_k = 30;
};

/// Paired test of negative links among negatively interacting pairs versus
/// matched random non-interacting pairs, plus the ratio-vs-K curve.
CorrelationReport interaction_link_correlation(const InteractionMatrix& n, std::span<const Pair> negatives,
                                               const CorrelationOptions& options = {});

/// Fraction of ordered pairs carrying a negative link: |negatives| / (m(m-1)).
double random_pair_ratio(std::size_t negatives, std::int64_t users);

std::string to_json(const PathLengthHistogram& h);
std::string to_csv(const PathLengthHistogram& h);
std::string to_json(const TriadReport& r);
std::string to_json(const CorrelationReport& r);
/// One row per K.
std::string to_csv(const CorrelationReport& r);

}  // namespace nelp::analysis
