#include "nelp/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nelp/text.hpp"
#include "nelp/util.hpp"

namespace nelp::features {

const FeatureSchema& FeatureSchema::standard() {
  static const FeatureSchema schema = [] {
    FeatureSchema s;
    s.version = std::string(kSchemaVersion);
    const char* user[] = {"pos_in_degree",        "pos_out_degree",        "pos_triads",
                          "posts_authored",       "posts_with_pos_opinion", "posts_with_neg_opinion",
                          "pos_opinions_given",   "neg_opinions_given"};
    for (auto* n : user) {
      s.names.push_back(std::string("i_") + n);
      s.groups.push_back(Group::UserI);
    }
    for (auto* n : user) {
      s.names.push_back(std::string("j_") + n);
      s.groups.push_back(Group::UserJ);
    }
    for (auto* n : {"pos_interactions_ij", "neg_interactions_ij", "pos_interactions_ji", "neg_interactions_ji",
                    "jaccard_pos_in", "jaccard_pos_out", "shortest_path"}) {
      s.names.emplace_back(n);
      s.groups.push_back(Group::Pair);
    }
    for (auto* n : {"i_neg_in_weighted", "i_neg_out_weighted", "j_neg_in_weighted", "j_neg_out_weighted",
                    "jaccard_neg_in", "jaccard_neg_out"}) {
      s.names.emplace_back(n);
      s.groups.push_back(Group::Sign);
    }
    const char* config[] = {"fp", "fn", "bp", "bn"};
    for (auto* a : config)
      for (auto* b : config) {
        s.names.push_back(std::string("triad_") + a + "_" + b);
        s.groups.push_back(Group::Sign);
      }
    return s;
  }();
  return schema;
}

namespace {

double positive_triangles(UserId u, const PositiveNetwork& g) {
  auto nu = g.neighbors(u);
  std::size_t twice = 0;
  for (auto v : nu) {
    auto nv = g.neighbors(v);
    auto a = nu.begin();
    auto b = nv.begin();
    while (a != nu.end() && b != nv.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++twice;
        ++a;
        ++b;
      }
    }
  }
  return static_cast<double>(twice / 2);
}

std::vector<UserId> without(std::span<const UserId> s, UserId x) {
  std::vector<UserId> out;
  out.reserve(s.size());
  for (auto v : s)
    if (v != x) out.push_back(v);
  return out;
}

double weight_sum_except(std::span<const UserId> ids, std::span<const double> w, UserId skip) {
  double total = 0.0;
  for (std::size_t k = 0; k < ids.size(); ++k)
    if (ids[k] != skip) total += w[k];
  return total;
}

// Configuration index of an edge between the pair (a, b): 0 forward positive,
// 1 forward negative, 2 backward positive, 3 backward negative.
struct ConfiguredEdge {
  int config;
  double weight;
};

int collect_edges(const SignedNetwork& g, UserId a, UserId b, std::array<ConfiguredEdge, 4>& out) {
  int n = 0;
  if (g.positive().has_edge(a, b)) out[n++] = {0, 1.0};
  if (double w = g.negative_weight(a, b); g.has_negative(a, b)) out[n++] = {1, w};
  if (g.positive().has_edge(b, a)) out[n++] = {2, 1.0};
  if (double w = g.negative_weight(b, a); g.has_negative(b, a)) out[n++] = {3, w};
  return n;
}

}  // namespace

UserFeatures user_features(UserId u, const PositiveNetwork& g_p, const InteractionData& data) {
  g_p.check_user(u);
  UserFeatures f{};
  f[0] = static_cast<double>(g_p.in(u).size());
  f[1] = static_cast<double>(g_p.out(u).size());
  f[2] = positive_triangles(u, g_p);
  auto posts = data.posts_by(u);
  f[3] = static_cast<double>(posts.size());
  for (auto p : posts) {
    bool pos = false, neg = false;
    for (const auto& o : data.opinions_on(p)) (o.value > 0 ? pos : neg) = true;
    f[4] += pos ? 1.0 : 0.0;
    f[5] += neg ? 1.0 : 0.0;
  }
  for (const auto& o : data.opinions_by(u)) (o.value > 0 ? f[6] : f[7]) += 1.0;
  return f;
}

PairFeatures pair_features(UserId i, UserId j, const PositiveNetwork& g_p, const InteractionData& data, int cap) {
  g_p.check_user(i);
  g_p.check_user(j);
  if (i == j) throw std::invalid_argument("pair_features: i == j");
  PairFeatures f{};
  for (const auto& o : data.opinions_by(i))
    if (data.author(o.post) == j) (o.value > 0 ? f[0] : f[1]) += 1.0;
  for (const auto& o : data.opinions_by(j))
    if (data.author(o.post) == i) (o.value > 0 ? f[2] : f[3]) += 1.0;
  f[4] = jaccard(g_p.in(i), g_p.in(j));
  f[5] = jaccard(g_p.out(i), g_p.out(j));
  auto len = shortest_path_length(g_p, i, j, cap, Direction::Directed);
  f[6] = len.finite() ? static_cast<double>(len.hops) : static_cast<double>(cap + 1);
  return f;
}

SignFeatures sign_features(UserId i, UserId j, const SignedNetwork& view) {
  view.positive().check_user(i);
  view.positive().check_user(j);
  if (i == j) throw std::invalid_argument("sign_features: i == j");
  SignFeatures f{};
  f[0] = weight_sum_except(view.negative_in(i), view.negative_in_weights(i), -1);
  f[1] = weight_sum_except(view.negative_out(i), view.negative_out_weights(i), j);
  f[2] = weight_sum_except(view.negative_in(j), view.negative_in_weights(j), i);
  f[3] = weight_sum_except(view.negative_out(j), view.negative_out_weights(j), -1);
  auto in_j = without(view.negative_in(j), i);
  auto out_i = without(view.negative_out(i), j);
  f[4] = jaccard(view.negative_in(i), in_j);
  f[5] = jaccard(out_i, view.negative_out(j));

  auto ni = view.neighbors(i);
  auto nj = view.neighbors(j);
  auto a = ni.begin();
  auto b = nj.begin();
  std::array<ConfiguredEdge, 4> first{}, second{};
  while (a != ni.end() && b != nj.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      const UserId w = *a;
      ++a;
      ++b;
      if (w == i || w == j) continue;
      int n1 = collect_edges(view, i, w, first);
      int n2 = collect_edges(view, w, j, second);
      for (int x = 0; x < n1; ++x)
        for (int y = 0; y < n2; ++y)
          f[static_cast<std::size_t>(6 + first[static_cast<std::size_t>(x)].config * 4 +
                                     second[static_cast<std::size_t>(y)].config)] +=
              first[static_cast<std::size_t>(x)].weight * second[static_cast<std::size_t>(y)].weight;
    }
  }
  return f;
}

FeatureExtractor::FeatureExtractor(const SignedNetwork& view, const InteractionData& data, ExtractorOptions options)
    : view_(view),
      data_(data),
      options_(options),
      positive_(compute_interactions(data, Polarity::Positive)),
      negative_(compute_interactions(data, Polarity::Negative)) {
  if (data.num_users() != view.num_users()) throw std::invalid_argument("FeatureExtractor: user count mismatch");
  if (options.path_cap < 1) throw std::invalid_argument("FeatureExtractor: path cap < 1");
  users_.resize(static_cast<std::size_t>(view.num_users()));
  parallel_for(users_.size(), options.threads, [&](std::size_t u) {
    users_[u] = user_features(static_cast<UserId>(u), view.positive(), data);
  });
}

FeatureMatrix FeatureExtractor::extract(std::span<const Pair> pairs) const {
  const auto& g = view_.positive();
  FeatureMatrix out;
  out.pairs.assign(pairs.begin(), pairs.end());
  out.values.resize(static_cast<Eigen::Index>(pairs.size()), static_cast<Eigen::Index>(kFeatureCount));
  for (const auto& p : pairs) {
    g.check_user(p.src);
    g.check_user(p.dst);
    if (p.src == p.dst) throw std::invalid_argument("extract: pair with identical endpoints");
  }

  // One BFS per distinct source.
  std::map<UserId, std::vector<std::size_t>> by_source;
  for (std::size_t r = 0; r < pairs.size(); ++r) by_source[pairs[r].src].push_back(r);
  std::vector<const std::vector<std::size_t>*> groups;
  std::vector<UserId> sources;
  for (const auto& [src, rows] : by_source) {
    sources.push_back(src);
    groups.push_back(&rows);
  }
  const int cap = options_.path_cap;
  parallel_for(groups.size(), options_.threads, [&](std::size_t gi) {
    auto dist = bfs_distances(g, sources[gi], cap, Direction::Directed);
    for (auto r : *groups[gi]) {
      const auto i = pairs[r].src;
      const auto j = pairs[r].dst;
      auto row = out.values.row(static_cast<Eigen::Index>(r));
      const auto& ui = user(i);
      const auto& uj = user(j);
      std::size_t c = 0;
      for (auto v : ui) row(static_cast<Eigen::Index>(c++)) = v;
      for (auto v : uj) row(static_cast<Eigen::Index>(c++)) = v;
      row(static_cast<Eigen::Index>(c++)) = positive_.at(i, j);
      row(static_cast<Eigen::Index>(c++)) = negative_.at(i, j);
      row(static_cast<Eigen::Index>(c++)) = positive_.at(j, i);
      row(static_cast<Eigen::Index>(c++)) = negative_.at(j, i);
      row(static_cast<Eigen::Index>(c++)) = jaccard(g.in(i), g.in(j));
      row(static_cast<Eigen::Index>(c++)) = jaccard(g.out(i), g.out(j));
      auto d = dist[static_cast<std::size_t>(j)];
      row(static_cast<Eigen::Index>(c++)) = d > 0 ? static_cast<double>(d) : static_cast<double>(cap + 1);
      for (auto v : sign_features(i, j, view_)) row(static_cast<Eigen::Index>(c++)) = v;
    }
  });
  return out;
}

Standardization fit_standardization(const RowMatrix& x) {
  if (x.rows() < 2) throw std::invalid_argument("standardize: need at least 2 rows");
  Standardization s;
  s.mean = x.colwise().mean().transpose();
  s.stdev.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    double ss = (x.col(c).array() - s.mean(c)).square().sum();
    s.stdev(c) = std::sqrt(ss / static_cast<double>(x.rows()));
  }
  return s;
}

namespace {

bool flat(double stdev, double mean) { return stdev <= 1e-12 * std::max(1.0, std::abs(mean)); }

}  // namespace

RowMatrix Standardization::apply(const RowMatrix& x) const {
  if (x.cols() != mean.size()) throw std::invalid_argument("standardize: column count mismatch");
  RowMatrix z(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    if (flat(stdev(c), mean(c)))
      z.col(c).setZero();
    else
      z.col(c) = ((x.col(c).array() - mean(c)) / stdev(c)).cwiseMax(-clip).cwiseMin(clip);
  }
  return z;
}

Eigen::VectorXd Standardization::apply(const Eigen::VectorXd& x) const {
  if (x.size() != mean.size()) throw std::invalid_argument("standardize: dimension mismatch");
  Eigen::VectorXd z(x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c)
    z(c) = flat(stdev(c), mean(c)) ? 0.0 : std::clamp((x(c) - mean(c)) / stdev(c), -clip, clip);
  return z;
}

std::string to_tsv(const FeatureMatrix& m, const IdMap& users) {
  const auto& schema = FeatureSchema::standard();
  std::ostringstream os;
  os << "#schema\t" << schema.version << '\n';
  os << "src\tdst";
  for (const auto& n : schema.names) os << '\t' << n;
  os << '\n';
  for (std::size_t r = 0; r < m.pairs.size(); ++r) {
    os << users.name(m.pairs[r].src) << '\t' << users.name(m.pairs[r].dst);
    for (Eigen::Index c = 0; c < m.values.cols(); ++c)
      os << '\t' << format_double(m.values(static_cast<Eigen::Index>(r), c));
    os << '\n';
  }
  return os.str();
}

}  // namespace nelp::features
