#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "nelp/features.hpp"
#include "oracles.hpp"

using namespace nelp;
using namespace nelp::features;

namespace {

struct Instance {
  oracle::SignedInstance graph;
  oracle::InteractionInstance opinions;
};

Instance random_instance(Rng& rng) {
  const int n = 4 + static_cast<int>(uniform_index(rng, 20));
  Instance inst;
  inst.graph = oracle::random_signed(n, 0.15, 0.1, rng, true);
  inst.opinions = oracle::random_interactions(n, 3 * n, 0.1, rng);
  return inst;
}

}  // namespace

TEST_CASE("schema has 45 unique names in four groups") {
  const auto& s = FeatureSchema::standard();
  CHECK(kFeatureCount == 45);
  CHECK(s.names.size() == 45);
  CHECK(s.groups.size() == 45);
  CHECK(std::set<std::string>(s.names.begin(), s.names.end()).size() == 45);
  CHECK(s.version == kSchemaVersion);
  std::size_t sign = 0;
  for (auto g : s.groups) sign += g == Group::Sign;
  CHECK(sign == 22);
}

TEST_CASE("a single weighted two-leg path lights exactly one triad column") {
  // i=0 -> w=2 positive, w=2 -> j=1 negative with weight 0.5.
  SignedNetwork g(PositiveNetwork(3, std::vector<Pair>{{0, 2}}), std::vector<WeightedEdge>{{2, 1, 0.5}});
  auto f = sign_features(0, 1, g);
  double total = 0.0;
  for (std::size_t k = 6; k < 22; ++k) total += f[k];
  CHECK(total == 0.5);
  // (forward-positive, forward-negative) sits at 6 + 4*0 + 1.
  CHECK(f[7] == 0.5);
}

TEST_CASE("all three feature groups match the recount oracles on 20 instances") {
  Rng rng(451);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = random_instance(rng);
    const int n = inst.graph.n;
    auto view = oracle::build(inst.graph);
    auto data = oracle::build(inst.opinions);
    const int cap = 1 + static_cast<int>(uniform_index(rng, 5));
    FeatureExtractor ex(view, data, {cap, 1});

    std::vector<Pair> pairs;
    for (UserId i = 0; i < n; ++i)
      for (UserId j = 0; j < n; ++j)
        if (i != j) pairs.push_back({i, j});
    auto m = ex.extract(pairs);
    REQUIRE(m.values.rows() == static_cast<Eigen::Index>(pairs.size()));
    REQUIRE(m.values.cols() == 45);

    for (std::size_t r = 0; r < pairs.size(); ++r) {
      const auto [i, j] = pairs[r];
      auto ui = oracle::user_features(i, inst.graph.sign, inst.opinions);
      auto uj = oracle::user_features(j, inst.graph.sign, inst.opinions);
      auto pf = oracle::pair_features(i, j, inst.graph.sign, inst.opinions, cap);
      auto sf = oracle::sign_features(i, j, inst.graph);
      std::vector<double> want;
      want.insert(want.end(), ui.begin(), ui.end());
      want.insert(want.end(), uj.begin(), uj.end());
      want.insert(want.end(), pf.begin(), pf.end());
      want.insert(want.end(), sf.begin(), sf.end());
      for (std::size_t c = 0; c < 45; ++c) {
        INFO("trial " << trial << " pair " << i << "," << j << " column " << FeatureSchema::standard().names[c]);
        REQUIRE(m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) == doctest::Approx(want[c]));
      }
    }

    // The one-pair helpers agree with the batch extractor.
    const auto [i, j] = pairs[uniform_index(rng, pairs.size())];
    auto single = sign_features(i, j, view);
    auto pf = pair_features(i, j, view.positive(), data, cap);
    auto row = std::find(pairs.begin(), pairs.end(), Pair{i, j}) - pairs.begin();
    for (std::size_t c = 0; c < kSignFeatureCount; ++c) CHECK(single[c] == m.values(row, static_cast<Eigen::Index>(23 + c)));
    for (std::size_t c = 0; c < kPairFeatureCount; ++c) CHECK(pf[c] == m.values(row, static_cast<Eigen::Index>(16 + c)));
  }
}

TEST_CASE("swapping the pair swaps the user blocks") {
  Rng rng(8);
  auto inst = random_instance(rng);
  auto view = oracle::build(inst.graph);
  auto data = oracle::build(inst.opinions);
  FeatureExtractor ex(view, data);
  std::vector<Pair> pairs{{0, 3}, {3, 0}};
  auto m = ex.extract(pairs);
  for (Eigen::Index c = 0; c < 8; ++c) {
    CHECK(m.values(0, c) == m.values(1, c + 8));
    CHECK(m.values(0, c + 8) == m.values(1, c));
  }
  // Degrees swap the same way.
  CHECK(m.values(0, 23) == m.values(1, 25));
  CHECK(m.values(0, 24) == m.values(1, 26));
}

TEST_CASE("extraction is deterministic and thread-count independent") {
  Rng rng(33);
  auto inst = random_instance(rng);
  auto view = oracle::build(inst.graph);
  auto data = oracle::build(inst.opinions);
  std::vector<Pair> pairs;
  for (UserId i = 0; i < inst.graph.n; ++i)
    for (UserId j = 0; j < inst.graph.n; ++j)
      if (i != j) pairs.push_back({i, j});
  auto a = FeatureExtractor(view, data, {6, 1}).extract(pairs);
  auto b = FeatureExtractor(view, data, {6, 4}).extract(pairs);
  CHECK(a.values == b.values);
}

TEST_CASE("weighted degrees never drop when a weight grows") {
  Rng rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = oracle::random_signed(12, 0.15, 0.15, rng, true);
    if (inst.negative.empty()) continue;
    auto before = oracle::build(inst);
    auto raised = inst;
    auto& e = raised.negative[uniform_index(rng, raised.negative.size())];
    e.weight = std::min(1.0, e.weight + 0.25);
    auto after = oracle::build(raised);
    for (UserId i = 0; i < 12; ++i)
      for (UserId j = 0; j < 12; ++j) {
        if (i == j) continue;
        auto f0 = sign_features(i, j, before);
        auto f1 = sign_features(i, j, after);
        for (std::size_t c = 0; c < 4; ++c) CHECK(f1[c] >= f0[c]);
      }
  }
}

TEST_CASE("unit weights reduce triad features to configuration counts") {
  Rng rng(4);
  auto inst = oracle::random_signed(15, 0.2, 0.1, rng, false);
  auto g = oracle::build(inst);
  for (UserId i = 0; i < 15; ++i)
    for (UserId j = 0; j < 15; ++j) {
      if (i == j) continue;
      auto f = sign_features(i, j, g);
      for (std::size_t c = 6; c < 22; ++c) CHECK(f[c] == std::floor(f[c]));
    }
}

TEST_CASE("standardization") {
  RowMatrix x(4, 3);
  x << 1, 5, 0,  //
      3, 5, 0,   //
      5, 5, 0,   //
      7, 5, 100;
  auto s = fit_standardization(x);
  CHECK(s.mean(0) == 4.0);
  CHECK(s.stdev(0) == doctest::Approx(std::sqrt(5.0)));
  auto z = s.apply(x);
  CHECK(z.col(0).sum() == doctest::Approx(0.0));
  CHECK(z.col(0).squaredNorm() / 4 == doctest::Approx(1.0));
  // Constant column.
  CHECK(z.col(1).isZero());
  // An outlier column clips at the bound.
  Eigen::VectorXd far(3);
  far << 4, 5, 1e6;
  CHECK(s.apply(far)(2) == s.clip);
  CHECK(s.apply(far)(1) == 0.0);
}

TEST_CASE("feature TSV layout") {
  IdMap users = IdMap::from_names({"a", "b"});
  FeatureMatrix m;
  m.pairs = {{0, 1}};
  m.values = RowMatrix::Zero(1, 45);
  auto text = to_tsv(m, users);
  CHECK(text.rfind("#schema", 0) == 0);
  CHECK(text.find("\na\tb\t") != std::string::npos);
}
