#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nelp/graph.hpp"

namespace nelp::features {

inline constexpr std::size_t kUserFeatureCount = 8;
inline constexpr std::size_t kPairFeatureCount = 7;
inline constexpr std::size_t kSignFeatureCount = 22;
inline constexpr std::size_t kFeatureCount = 2 * kUserFeatureCount + kPairFeatureCount + kSignFeatureCount;
inline constexpr std::string_view kSchemaVersion = "nelp-features-v1";

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Group { UserI, UserJ, Pair, Sign };

struct FeatureSchema {
  std::string version;
  std::vector<std::string> names;
  std::vector<Group> groups;

  /// The 45-column layout: user features of i, user features of j, pair
  /// features, sign features. The 16 triad columns are ordered
  /// lexicographically over (edge i-w, edge w-j) with configurations
  /// fp, fn, bp, bn (forward/backward, positive/negative).
  static const FeatureSchema& standard();
};

using UserFeatures = std::array<double, kUserFeatureCount>;
using PairFeatures = std::array<double, kPairFeatureCount>;
using SignFeatures = std::array<double, kSignFeatureCount>;

/// [in-degree, out-degree, positive triangles, posts authored, posts with a
/// positive opinion, posts with a negative opinion, positive opinions given,
/// negative opinions given].
UserFeatures user_features(UserId u, const PositiveNetwork& g_p, const InteractionData& data);

/// [pos i->j, neg i->j, pos j->i, neg j->i, Jaccard of positive in-sets,
/// Jaccard of positive out-sets, directed path length i->j or cap + 1].
PairFeatures pair_features(UserId i, UserId j, const PositiveNetwork& g_p, const InteractionData& data, int cap);

/// Weighted negative degrees of i and j, negative Jaccard coefficients, then
/// the 16 weighted triad configurations over common neighbors. The edge
/// i->j itself is left out of the degrees and neighbor sets.
SignFeatures sign_features(UserId i, UserId j, const SignedNetwork& view);

struct FeatureMatrix {
  std::vector<Pair> pairs;
  RowMatrix values;
};

struct ExtractorOptions {
  int path_cap = 6;
  unsigned threads = 1;
};

/// Batch extraction with per-user features, interaction counts and BFS
/// distances computed once and shared read-only across pairs.
class FeatureExtractor {
 public:
  FeatureExtractor(const SignedNetwork& view, const InteractionData& data, ExtractorOptions options = {});

  FeatureMatrix extract(std::span<const Pair> pairs) const;
  const UserFeatures& user(UserId u) const { return users_.at(static_cast<std::size_t>(u)); }

 private:
  const SignedNetwork& view_;
  const InteractionData& data_;
  ExtractorOptions options_;
  std::vector<UserFeatures> users_;
  InteractionMatrix positive_;
  InteractionMatrix negative_;
};

/// Per-column training statistics (population standard deviation).
struct Standardization {
  Eigen::VectorXd mean;
  Eigen::VectorXd stdev;
  /// Standardized values are clipped to [-clip, clip]. Sparse count columns
  /// otherwise reach hundreds of deviations and wreck the conditioning of
  /// the dual.
  double clip = 5.0;

  /// Columns with zero spread map to 0.
  RowMatrix apply(const RowMatrix& x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

Standardization fit_standardization(const RowMatrix& x);

/// TSV with a `#schema` line, a header naming src, dst and all 45 columns,
/// then one row per pair.
std::string to_tsv(const FeatureMatrix& m, const IdMap& users);

}  // namespace nelp::features
