#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nelp/graph.hpp"
#include "oracles.hpp"

using namespace nelp;

TEST_CASE("positive network drops self loops and duplicates") {
  std::vector<Pair> e{{0, 1}, {0, 1}, {2, 2}, {1, 2}};
  PositiveNetwork::BuildStats stats;
  PositiveNetwork g(3, e, &stats);
  CHECK(g.num_edges() == 2);
  CHECK(stats.duplicates == 1);
  CHECK(stats.self_loops == 1);
  CHECK(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(1, 0));
  CHECK(g.linked(1, 0));
  CHECK(g.neighbors(1).size() == 2);
  CHECK_THROWS(PositiveNetwork(2, std::vector<Pair>{{0, 5}}));
}

TEST_CASE("signed network rejects bad negative edges") {
  PositiveNetwork g(3, std::vector<Pair>{{0, 1}});
  CHECK_THROWS(SignedNetwork(g, std::vector<WeightedEdge>{{0, 1, 1.0}}));
  CHECK_THROWS(SignedNetwork(g, std::vector<WeightedEdge>{{1, 2, 1.5}}));
  CHECK_THROWS(SignedNetwork(g, std::vector<WeightedEdge>{{2, 2, 1.0}}));
  CHECK_THROWS(SignedNetwork(g, std::vector<WeightedEdge>{{1, 2, 1.0}, {1, 2, 0.5}}));
  SignedNetwork s(g, std::vector<WeightedEdge>{{1, 0, 0.25}});
  CHECK(s.edge_sign(0, 1) == Sign::Positive);
  CHECK(s.edge_sign(1, 0) == Sign::Negative);
  CHECK_FALSE(s.edge_sign(0, 2).has_value());
  CHECK(s.negative_weight(1, 0) == 0.25);
  CHECK(s.negative_weight(0, 1) == 0.0);
}

TEST_CASE("id map interns in first-seen order") {
  IdMap m;
  CHECK(m.intern("b") == 0);
  CHECK(m.intern("a") == 1);
  CHECK(m.intern("b") == 0);
  CHECK(m.find("a") == 1);
  CHECK_FALSE(m.find("c").has_value());
  CHECK(m.name(1) == "a");
}

TEST_CASE("negative interaction matrix") {
  SUBCASE("empty opinions give an all-zero matrix") {
    InteractionData d(3, {0, 1}, {});
    CHECK(compute_negative_interactions(d).nonzeros() == 0);
  }
  SUBCASE("two dislikes of the same author's posts sum") {
    InteractionData d(2, {1, 1}, {{0, 0, -1}, {0, 1, -1}});
    auto n = compute_negative_interactions(d);
    CHECK(n.at(0, 1) == 2);
    CHECK(n.at(1, 0) == 0);
  }
  SUBCASE("likes never count") {
    InteractionData d(2, {1}, {{0, 0, 1}});
    CHECK(compute_negative_interactions(d).nonzeros() == 0);
  }
  SUBCASE("author-to-holder orientation is the transpose") {
    Rng rng(7);
    auto inst = oracle::random_interactions(12, 30, 0.2, rng);
    auto d = oracle::build(inst);
    auto a = compute_negative_interactions(d);
    auto b = compute_negative_interactions(d, Orientation::AuthorToHolder);
    for (UserId i = 0; i < 12; ++i)
      for (UserId j = 0; j < 12; ++j) CHECK(a.at(i, j) == b.at(j, i));
  }
}

TEST_CASE("interaction matrices equal the triple-loop count on 100 instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int users = 2 + static_cast<int>(uniform_index(rng, 20));
    const int posts = 1 + static_cast<int>(uniform_index(rng, 40));
    auto inst = oracle::random_interactions(users, posts, 0.15, rng);
    auto d = oracle::build(inst);
    for (int sign : {-1, 1}) {
      auto expect = oracle::interaction_counts(inst, sign);
      auto got = compute_interactions(d, sign < 0 ? Polarity::Negative : Polarity::Positive);
      for (UserId i = 0; i < users; ++i)
        for (UserId j = 0; j < users; ++j) REQUIRE(got.at(i, j) == expect[i][j]);
    }
  }
}

TEST_CASE("shortest path lengths") {
  PositiveNetwork path(4, std::vector<Pair>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(shortest_path_length(path, 0, 1, 6).hops == 1);
  CHECK(shortest_path_length(path, 0, 3, 6).hops == 3);
  CHECK(shortest_path_length(path, 3, 0, 6).kind == PathLength::Kind::Unreachable);
  CHECK(shortest_path_length(path, 3, 0, 6, Direction::Undirected).hops == 3);
  CHECK(shortest_path_length(path, 0, 3, 2).kind == PathLength::Kind::BeyondCap);
  CHECK_THROWS(shortest_path_length(path, 1, 1, 6));
  CHECK_THROWS(shortest_path_length(path, 0, 1, 0));
}

TEST_CASE("BFS agrees with Floyd-Warshall") {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(uniform_index(rng, 25));
    auto edges = oracle::random_edges(n, 0.08, rng);
    PositiveNetwork g(n, edges);
    for (bool directed : {true, false}) {
      auto fw = oracle::floyd_warshall(n, edges, directed);
      const auto dir = directed ? Direction::Directed : Direction::Undirected;
      for (int cap : {1, 3, 6}) {
        for (UserId a = 0; a < n; ++a) {
          auto dist = bfs_distances(g, a, cap, dir);
          for (UserId b = 0; b < n; ++b) {
            const int want = fw[a][b] <= cap ? fw[a][b] : -1;
            REQUIRE(dist[b] == want);
            if (a == b) continue;
            auto len = shortest_path_length(g, a, b, cap, dir);
            if (fw[a][b] <= cap) {
              REQUIRE(len.finite());
              REQUIRE(len.hops == fw[a][b]);
            } else if (fw[a][b] == oracle::kInf) {
              REQUIRE(len.kind == PathLength::Kind::Unreachable);
            } else {
              REQUIRE(len.kind == PathLength::Kind::BeyondCap);
            }
          }
        }
      }
    }
  }
}

namespace {

SignedNetwork triangle(Sign ab, Sign bc, Sign ca) {
  std::vector<Pair> pos;
  std::vector<WeightedEdge> neg;
  auto add = [&](UserId a, UserId b, Sign s) {
    if (s == Sign::Positive)
      pos.push_back({a, b});
    else
      neg.push_back({a, b, 1.0});
  };
  add(0, 1, ab);
  add(1, 2, bc);
  add(2, 0, ca);
  return SignedNetwork(PositiveNetwork(3, pos), neg);
}

}  // namespace

TEST_CASE("balance of the four sign combinations") {
  const auto P = Sign::Positive, N = Sign::Negative;
  auto balanced = [](const SignedNetwork& g) {
    return is_balanced(*make_triad(g, 0, 1, 2, TriadMode::UndirectedSigns));
  };
  CHECK(balanced(triangle(P, P, P)));
  CHECK_FALSE(balanced(triangle(P, P, N)));
  CHECK(balanced(triangle(P, N, N)));
  CHECK_FALSE(balanced(triangle(N, N, N)));
}

TEST_CASE("status on small triads") {
  const auto P = Sign::Positive, N = Sign::Negative;
  auto status = [](const SignedNetwork& g) {
    return satisfies_status(*make_triad(g, 0, 1, 2, TriadMode::DirectedSigned));
  };
  // 0->1->2->0 all positive is a cycle.
  CHECK_FALSE(status(triangle(P, P, P)));
  // Flipping one edge's sign reverses it and breaks the cycle.
  CHECK(status(triangle(P, P, N)));
  CHECK_FALSE(status(triangle(N, N, N)));

  // An acyclic positive chain 0->1, 1->2, 0->2.
  SignedNetwork chain(PositiveNetwork(3, std::vector<Pair>{{0, 1}, {1, 2}, {0, 2}}), {});
  CHECK(satisfies_status(*make_triad(chain, 0, 1, 2, TriadMode::DirectedSigned)));
  // 2 thinking less of 0 means 0 ranks below 2, which the chain implies.
  SignedNetwork chain2(PositiveNetwork(3, std::vector<Pair>{{0, 1}, {1, 2}}), std::vector<WeightedEdge>{{2, 0, 1}});
  CHECK(satisfies_status(*make_triad(chain2, 0, 1, 2, TriadMode::DirectedSigned)));
  // 0 thinking less of 2 contradicts it.
  SignedNetwork chain3(PositiveNetwork(3, std::vector<Pair>{{0, 1}, {1, 2}}), std::vector<WeightedEdge>{{0, 2, 1}});
  CHECK_FALSE(satisfies_status(*make_triad(chain3, 0, 1, 2, TriadMode::DirectedSigned)));
}

TEST_CASE("make_triad needs all three pairs linked") {
  SignedNetwork g(PositiveNetwork(3, std::vector<Pair>{{0, 1}, {1, 2}}), {});
  CHECK_FALSE(make_triad(g, 0, 1, 2, TriadMode::UndirectedSigns).has_value());
}

TEST_CASE("triad enumeration, balance and status match brute force on 50 graphs") {
  Rng rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(uniform_index(rng, 38));
    auto inst = oracle::random_signed(n, 0.12, 0.06, rng);
    auto g = oracle::build(inst);
    auto brute = oracle::brute_triads(inst.sign);

    auto und = enumerate_triads(g, TriadMode::UndirectedSigns);
    REQUIRE(und.triads.size() == brute.undirected);
    REQUIRE(und.conflicting_pairs == brute.conflicting_pairs);
    std::array<std::size_t, 4> by{};
    for (const auto& t : und.triads) {
      const auto [a, b, c] = t.nodes;
      REQUIRE(a < b);
      REQUIRE(b < c);
      int neg = 0;
      for (const auto& l : t.links) neg += *l.undirected == Sign::Negative;
      ++by[static_cast<std::size_t>(neg)];
      REQUIRE(is_balanced(t) == oracle::brute_balanced(inst.sign, a, b, c));
    }
    REQUIRE(by == brute.by_negatives);

    auto dir = enumerate_triads(g, TriadMode::DirectedSigned);
    REQUIRE(dir.triads.size() == brute.directed);
    std::size_t status = 0;
    for (const auto& t : dir.triads) {
      const bool s = satisfies_status(t);
      REQUIRE(s == oracle::brute_status(inst.sign, t.nodes[0], t.nodes[1], t.nodes[2]));
      status += s;
    }
    REQUIRE(status == brute.status);
  }
}

TEST_CASE("jaccard") {
  std::vector<UserId> a{1, 2, 3}, b{2, 3, 4}, e;
  CHECK(jaccard(a, b) == doctest::Approx(0.5));
  CHECK(jaccard(a, a) == 1.0);
  CHECK(jaccard(e, e) == 0.0);
  CHECK(jaccard(a, e) == 0.0);
}
