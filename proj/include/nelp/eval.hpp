#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nelp/config.hpp"
#include "nelp/dataset.hpp"
#include "nelp/features.hpp"
#include "nelp/sampling.hpp"
#include "nelp/solver.hpp"

namespace nelp::eval {

/// Counts with the negative link (-1) as the target class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct Metrics {
  Confusion confusion;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Precision, recall and F1 from counts, each 0 when its denominator is 0.
Metrics metrics_from(const Confusion& c);

/// `predictions[k]` in {-1, +1} labels `universe[k]`; `truth` is the sorted
/// negative link set. Throws if a truth pair lies outside the universe.
Metrics evaluate(std::span<const Pair> universe, std::span<const int> predictions, std::span<const Pair> truth);

std::vector<int> baseline_random(std::span<const Pair> universe, double rate, std::uint64_t seed);
/// -1 iff the directed shortest path from src to dst has exactly `length` hops.
std::vector<int> baseline_spath(std::span<const Pair> universe, const PositiveNetwork& g_p, int length,
                                unsigned threads = 1);
/// -1 iff N[i][j] != 0.
std::vector<int> baseline_negin(std::span<const Pair> universe, const InteractionMatrix& n);
/// -1 iff the pair is in the given sorted negative sample list.
std::vector<int> membership(std::span<const Pair> universe, std::span<const Pair> negatives);

enum class NegativeSource { NegInS, NegIn };

struct PipelineOptions {
  sampling::SamplingConfig sampling;
  solver::KernelSpec kernel;
  solver::SolverOptions solver;
  int path_cap = 6;
  std::size_t max_unlabeled = 20000;
  unsigned threads = 1;
  std::uint64_t seed = 1;

  static PipelineOptions from(const RunConfig& config);
};

struct TrainedModel {
  solver::Model model;
  solver::DualSolution solution;
  std::size_t labeled = 0;
  std::size_t unlabeled = 0;
  std::size_t couplings = 0;
};

/// Samples, the weighted signed view and every feature row, built once so
/// that hyperparameter variants share identical samples and features.
class Pipeline {
 public:
  Pipeline(const io::Dataset& data, const PipelineOptions& options, NegativeSource source = NegativeSource::NegInS);
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  const io::Dataset& data() const { return data_; }
  const InteractionMatrix& negative_interactions() const { return n_; }
  const sampling::NegativeSampleResult& negative_samples() const { return ns_; }
  const std::vector<sampling::Sample>& positive_samples() const { return ps_; }
  /// Sorted negative sample pairs.
  const std::vector<Pair>& negative_pairs() const { return ns_pairs_; }
  const SignedNetwork& view() const { return view_; }
  const features::FeatureMatrix& sample_features() const { return rows_; }
  std::size_t candidate_count() const { return candidates_; }

  TrainedModel train(const solver::Hyperparameters& hyper) const;
  features::FeatureMatrix features(std::span<const Pair> pairs) const;
  std::vector<solver::Prediction> predict(const solver::Model& model, std::span<const Pair> pairs) const;

 private:
  const io::Dataset& data_;
  PipelineOptions options_;
  InteractionMatrix n_;
  sampling::NegativeSampleResult ns_;
  std::vector<Pair> ns_pairs_;
  std::vector<sampling::Sample> ps_;
  SignedNetwork view_;
  std::unique_ptr<features::FeatureExtractor> extractor_;
  /// NS rows, then PS rows, then distance-2 candidates.
  features::FeatureMatrix rows_;
  std::size_t candidates_ = 0;
};

struct Universe {
  /// Sorted evaluation pairs.
  std::vector<Pair> pairs;
  std::size_t truth = 0;
  std::size_t interaction = 0;
  std::size_t refined = 0;
  std::size_t missing = 0;
  std::string definition;
};

/// Truth pairs, negIn pairs, negInS pairs, and round(missing_ratio * |truth|)
/// uniformly drawn ordered pairs that are neither positive links nor truth.
Universe build_universe(const io::Dataset& data, const io::GroundTruth& truth, std::span<const Pair> negin,
                        std::span<const Pair> negins, double missing_ratio, std::uint64_t seed);

struct MethodResult {
  std::string method;
  Metrics metrics;
  std::string detail;
};

struct Report {
  std::string kind;
  std::string dataset;
  std::vector<MethodResult> rows;
  /// Ordered key/value metadata (seeds, universe, config hash, ...).
  std::vector<std::pair<std::string, std::string>> metadata;
};

std::string to_csv(const Report& report);
std::string to_json(const Report& report);

/// Table-3 harness: random, sPath, negIn, negInS, NeLP-negIn and NeLP on one
/// shared universe.
Report run_comparison(const io::Dataset& data, const io::GroundTruth& truth, const RunConfig& config);

/// Trains on one dataset and evaluates on another.
Report cross_site(const io::Dataset& train, const io::Dataset& test, const io::GroundTruth& test_truth,
                  const RunConfig& config);

/// One train/evaluate cycle per C_b with shared samples and universe.
Report cb_sweep(const io::Dataset& data, const io::GroundTruth& truth, const RunConfig& config);

/// Full model and the four ablated variants.
Report ablation(const io::Dataset& data, const io::GroundTruth& truth, const RunConfig& config);

}  // namespace nelp::eval
