#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nelp/graph.hpp"

namespace nelp::sampling {

enum class WeightMode { Reliability, Uniform };

struct SamplingConfig {
  /// Weight of pairs added by status closure.
  double closure_weight = 0.5;
  /// |PS| / |NS|.
  double positive_ratio = 10.0;
  std::uint64_t seed = 0;
  WeightMode weight_mode = WeightMode::Reliability;

  void validate() const;
};

enum class Provenance { Interaction, StatusClosure, Random };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct Sample {
  Pair pair;
  int label = 0;
  double weight = 1.0;
  Provenance provenance = Provenance::Random;
};

struct SampleSet {
  std::vector<Sample> negatives;
  std::vector<Sample> positives;
};

/// f(n) = clamp(1 - 1/log2(1 + n), 0, 1) for n > 0, else the closure weight.
/// Uniform mode returns 1.
double reliability_weight(std::int64_t n, const SamplingConfig& cfg);

/// Outcome of the negative-sample construction, with the intermediate sets
/// kept for auditing.
struct NegativeSampleResult {
  /// Pairs with nonzero negative interactions, before refinement.
  std::vector<Pair> seed;
  /// Seed pairs dropped for sitting in a status-violating triad.
  std::vector<Pair> removed;
  /// Pairs added because they close triads consistently with status.
  std::vector<Pair> added;
  /// Final negative samples, sorted by pair.
  std::vector<Sample> negatives;
};

/// Seeds NS from nonzero entries of `n` (off-diagonal, no positive link
/// src->dst), removes pairs whose own edge lies in a triad violating status
/// theory, then in a single pass closes open triads around reliable samples
/// (f(N) > 0) wherever the status order implies a negative link, and finally
/// assigns reliability weights.
NegativeSampleResult construct_negative_samples(const PositiveNetwork& g_p, const InteractionMatrix& n,
                                                const SamplingConfig& cfg);

/// Only the seeding step: every pair with negative interactions.
std::vector<Pair> interaction_candidates(const PositiveNetwork& g_p, const InteractionMatrix& n);

/// Seed pairs that sit in at least one status-violating triad of the signed
/// network formed by g_p and `candidates`.
std::vector<Pair> status_violators(const PositiveNetwork& g_p, std::span<const Pair> candidates);

/// Weights a list of negative pairs: f(N) where N > 0, closure weight otherwise.
std::vector<Sample> weigh_negatives(std::span<const Pair> pairs, const InteractionMatrix& n,
                                    const SamplingConfig& cfg);

/// Uniformly samples round(ratio * |negatives|) ordered pairs i != j with no
/// positive link i->j and not among `negatives`. Throws if the graph cannot
/// supply that many.
std::vector<Sample> sample_positive_pairs(std::int32_t num_users, const PositiveNetwork& g_p,
                                          std::span<const Sample> negatives, const SamplingConfig& cfg);

/// Writes `src dst label weight provenance` rows, one per sample.
std::string to_tsv(const SampleSet& samples, const IdMap& users);
SampleSet from_tsv(std::string_view text, const IdMap& users);

}  // namespace nelp::sampling
