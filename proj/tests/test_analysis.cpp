#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>

#include "nelp/analysis.hpp"
#include "nelp/dataset.hpp"
#include "nelp/planted.hpp"
#include "oracles.hpp"

using namespace nelp;
using namespace nelp::analysis;

TEST_CASE("enemy path histogram") {
  SUBCASE("leaf pairs of a star sit two hops apart") {
    // Mutual star around 0.
    std::vector<Pair> e;
    for (UserId v = 1; v <= 4; ++v) {
      e.push_back({0, v});
      e.push_back({v, 0});
    }
    PositiveNetwork g(5, e);
    std::vector<Pair> neg{{1, 2}, {2, 3}, {3, 4}, {4, 1}};
    auto h = enemy_path_distribution(g, neg, 6);
    CHECK(h.counts[1] == 4);
    CHECK(h.total() == 4);
    CHECK(h.ratios()[1] == 1.0);
    CHECK(h.within(2) == 1.0);
    CHECK(h.within(1) == 0.0);
  }
  SUBCASE("disconnected components are unreachable") {
    PositiveNetwork g(4, std::vector<Pair>{{0, 1}, {2, 3}});
    auto h = enemy_path_distribution(g, std::vector<Pair>{{0, 2}, {1, 3}}, 6);
    CHECK(h.unreachable == 2);
    CHECK(h.ratios().back() == 1.0);
  }
  SUBCASE("no negatives is an error") {
    PositiveNetwork g(3, std::vector<Pair>{{0, 1}});
    CHECK_THROWS(enemy_path_distribution(g, {}, 6));
  }
  SUBCASE("every edge lands in exactly one bucket") {
    Rng rng(3);
    auto inst = oracle::random_signed(30, 0.05, 0.05, rng);
    PositiveNetwork g(30, inst.positive);
    std::vector<Pair> neg;
    for (const auto& e : inst.negative) neg.push_back({e.src, e.dst});
    auto h = enemy_path_distribution(g, neg, 3);
    CHECK(h.total() == neg.size());
    auto r = h.ratios();
    CHECK(std::accumulate(r.begin(), r.end(), 0.0) == doctest::Approx(1.0));
  }
}

TEST_CASE("triad census") {
  SUBCASE("positive clique on four users") {
    std::vector<Pair> e;
    for (UserId a = 0; a < 4; ++a)
      for (UserId b = a + 1; b < 4; ++b) e.push_back({a, b});
    auto r = triad_census(SignedNetwork(PositiveNetwork(4, e), {}));
    CHECK(r.total == 4);
    CHECK(r.balanced_ratio == 1.0);
  }
  SUBCASE("a single (+,+,-) triad is unbalanced") {
    SignedNetwork g(PositiveNetwork(3, std::vector<Pair>{{0, 1}, {1, 2}}), std::vector<WeightedEdge>{{0, 2, 1.0}});
    auto r = triad_census(g);
    CHECK(r.total == 1);
    CHECK(r.by_negatives[1] == 1);
    CHECK(r.balanced_ratio == 0.0);
  }
  SUBCASE("no triads leaves the ratios undefined") {
    auto r = triad_census(SignedNetwork(PositiveNetwork(3, std::vector<Pair>{{0, 1}}), {}));
    CHECK_FALSE(r.balanced_ratio.has_value());
    CHECK_FALSE(r.status_ratio.has_value());
  }
  SUBCASE("random graphs match the cubic census and survive relabeling") {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
      auto inst = oracle::random_signed(30, 0.15, 0.05, rng);
      auto brute = oracle::brute_triads(inst.sign);
      auto r = triad_census(oracle::build(inst));
      CHECK(r.total == brute.undirected);
      CHECK(r.by_negatives == brute.by_negatives);
      CHECK(r.directed_total == brute.directed);
      CHECK(r.status_satisfied == brute.status);
      CHECK(r.conflicting_pairs == brute.conflicting_pairs);

      std::vector<UserId> perm(30);
      std::iota(perm.begin(), perm.end(), 0);
      for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
      oracle::SignedInstance moved;
      moved.n = 30;
      for (const auto& e : inst.positive) moved.positive.push_back({perm[e.src], perm[e.dst]});
      for (const auto& e : inst.negative) moved.negative.push_back({perm[e.src], perm[e.dst], e.weight});
      auto r2 = triad_census(oracle::build(moved));
      CHECK(r2.by_negatives == r.by_negatives);
      CHECK(r2.status_satisfied == r.status_satisfied);
    }
  }
}

TEST_CASE("Welch t-test") {
  SUBCASE("reference values from an independent statistics package") {
    // scipy.stats.ttest_ind(s, r, equal_var=False, alternative="greater")
    std::vector<double> s{1, 1, 1, 0}, r{0, 0, 0, 0};
    auto t = welch_t_test(s, r);
    CHECK(t.t == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(t.p_one_sided == doctest::Approx(0.028834442811218657).epsilon(1e-6));

    std::vector<double> a{2.1, 3.4, 1.9, 5.0, 4.2}, b{1.0, 2.2, 0.7, 1.9};
    auto u = welch_t_test(a, b);
    CHECK(u.t == doctest::Approx(2.6909957002511042).epsilon(1e-10));
    CHECK(u.degrees_of_freedom == doctest::Approx(6.30317217734655).epsilon(1e-10));
    CHECK(u.p_one_sided == doctest::Approx(0.017156088617232435).epsilon(1e-6));
  }
  SUBCASE("identical samples give t = 0 and p = 1/2") {
    std::vector<double> s{1, 2, 3, 4};
    auto t = welch_t_test(s, s);
    CHECK(t.t == 0.0);
    CHECK(t.p_one_sided == doctest::Approx(0.5));
  }
  SUBCASE("orientation and antisymmetry") {
    std::vector<double> lo{0, 1, 0, 1, 0}, hi{1, 1, 2, 1, 3};
    auto a = welch_t_test(lo, hi);
    auto b = welch_t_test(hi, lo);
    CHECK(a.p_one_sided > 0.5);
    CHECK(a.t == doctest::Approx(-b.t));
  }
  SUBCASE("degenerate inputs") {
    std::vector<double> one{1}, c{2, 2, 2}, d{1, 1};
    CHECK_THROWS(welch_t_test(one, c));
    CHECK_THROWS(welch_t_test(c, c));
    auto t = welch_t_test(c, d);
    CHECK(std::isinf(t.t));
    CHECK(t.p_one_sided == 0.0);
  }
}

TEST_CASE("random pair ratios of the two benchmark networks") {
  CHECK(random_pair_ratio(52704, 14765) == doctest::Approx(2.4177e-04).epsilon(1e-4));
  CHECK(random_pair_ratio(20851, 7275) == doctest::Approx(3.9402e-04).epsilon(1e-4));
}

TEST_CASE("interaction-link correlation") {
  SUBCASE("links exactly where interactions are") {
    Rng rng(12);
    std::vector<InteractionMatrix::Entry> entries;
    std::vector<Pair> neg;
    for (UserId i = 0; i < 200; ++i) {
      const auto j = static_cast<UserId>((i + 1 + uniform_index(rng, 198)) % 200);
      entries.push_back({i, j, static_cast<std::int32_t>(1 + uniform_index(rng, 4))});
      neg.push_back({i, j});
    }
    std::sort(neg.begin(), neg.end());
    InteractionMatrix n(200, entries);
    CorrelationOptions opt;
    opt.seed = 5;
    opt.min_pairs_per_k = 10;
    auto r = interaction_link_correlation(n, neg, opt);
    CHECK(r.interacting_pairs == 200);
    for (double v : r.ratio_curve) CHECK(v == 1.0);
    CHECK(r.random_baseline < 0.01);
    CHECK(r.significant);
    for (std::size_t k = 1; k < r.qualifying.size(); ++k) CHECK(r.qualifying[k] <= r.qualifying[k - 1]);
  }
  SUBCASE("planted data: the curve rises with K") {
    io::PlantedParams p;
    p.users = 600;
    auto planted = io::generate_planted(p, 4);
    auto ing = io::ingest(planted.bundle);
    auto n = compute_negative_interactions(ing.data.interactions);
    CorrelationOptions opt;
    opt.seed = 1;
    auto r = interaction_link_correlation(n, ing.truth->negatives, opt);
    CHECK(r.significant);
    REQUIRE(r.ratio_curve.size() >= 2);
    CHECK(r.ratio_curve.front() > 10 * r.random_baseline);
    // Nondecreasing up to sampling noise.
    for (std::size_t k = 1; k < r.ratio_curve.size(); ++k) CHECK(r.ratio_curve[k] >= r.ratio_curve[k - 1] - 0.1);
    CHECK(r.ratio_curve.back() > r.ratio_curve.front());
  }
  SUBCASE("too few interacting pairs") {
    InteractionMatrix n(5, {{0, 1, 1}});
    CHECK_THROWS(interaction_link_correlation(n, std::vector<Pair>{{0, 1}}));
  }
}
