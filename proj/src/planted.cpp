#include "nelp/planted.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "nelp/analysis.hpp"
#include "nelp/util.hpp"

namespace nelp::io {

void PlantedParams::validate() const {
  if (users < 10) throw std::invalid_argument("planted model needs at least 10 users");
  if (window < 1 || 2 * window >= users) throw std::invalid_argument("planted window must lie in [1, users/2)");
  if (faction_run < 1) throw std::invalid_argument("planted faction run must be >= 1");
  auto open_unit = [](double v, const char* what) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument(std::string(what) + " must lie in (0,1)");
  };
  auto unit = [](double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
  };
  open_unit(positive_density, "positive density");
  open_unit(negative_density, "negative density");
  unit(bridge_density, "bridge density");
  unit(closure_probability, "closure probability");
  if (!(balanced_fraction >= 0.25 && balanced_fraction <= 1.0))
    throw std::invalid_argument("balanced fraction must lie in [0.25, 1]; sign noise cannot push it lower");
  unit(reciprocity, "reciprocity");
  unit(status_noise, "status noise");
  unit(dislike_probability, "dislike probability");
  unit(mild_dislike_probability, "mild dislike probability");
  unit(like_probability, "like probability");
  unit(friend_dislike_probability, "friend dislike probability");
  if (like_probability + friend_dislike_probability > 1.0)
    throw std::invalid_argument("like and friend dislike probabilities must sum to at most 1");
  if (!(shortcuts >= 0.0) || !(posts_mean >= 0.0) || !(background_dislikes >= 0.0) || !(background_likes >= 0.0))
    throw std::invalid_argument("planted means must be >= 0");
}

double flip_probability(double balanced_fraction, double structural) {
  if (balanced_fraction >= structural) return 0.0;
  // Balance after noise is structural - odd * (2 structural - 1), where odd
  // is the chance that an odd number of a triad's three signs flip.
  if (structural <= 0.5) return 0.5;
  const double odd = std::min(0.5, (structural - balanced_fraction) / (2 * structural - 1));
  auto parity = [](double e) { return 3 * e * (1 - e) * (1 - e) + e * e * e; };
  double lo = 0.0, hi = 0.5;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (parity(mid) < odd ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

std::int64_t poisson(Rng& rng, double mean) {
  const double limit = std::exp(-mean);
  std::int64_t k = 0;
  double prod = uniform_real(rng);
  while (prod > limit) {
    ++k;
    prod *= uniform_real(rng);
  }
  return k;
}

bool coin(Rng& rng, double p) { return uniform_real(rng) < p; }

struct Links {
  std::set<Pair> positive, negative, mild;
};

Links draw_links(const PlantedParams& params, std::uint64_t seed, double flip) {
  const auto m = params.users;
  Rng rng(derive_seed(seed, "planted"));

  std::vector<int> faction(static_cast<std::size_t>(m));
  for (UserId u = 0; u < m; ++u) faction[static_cast<std::size_t>(u)] = (u / params.faction_run) % 2;
  std::vector<UserId> rank(static_cast<std::size_t>(m));
  std::iota(rank.begin(), rank.end(), 0);
  for (std::size_t i = rank.size(); i > 1; --i) std::swap(rank[i - 1], rank[uniform_index(rng, i)]);

  auto lower = [&](UserId a, UserId b) { return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]; };

  // Each in-window pair links with a faction-dependent density; its sign
  // follows the factions unless flipped.
  Links out;
  auto& [positive, negative, mild] = out;
  std::vector<Pair> feuds;
  for (UserId u = 0; u < m; ++u) {
    for (int step = 1; step <= params.window; ++step) {
      const UserId v = (u + step) % m;
      const bool same = faction[static_cast<std::size_t>(u)] == faction[static_cast<std::size_t>(v)];
      // Some friendships cross faction lines; they give enemies short
      // positive paths to each other.
      const bool bridge = !same && coin(rng, params.bridge_density);
      if (!bridge && !coin(rng, same ? params.positive_density : params.negative_density)) continue;
      const bool positive_sign = bridge || (coin(rng, flip) ? !same : same);
      // Status order: positive links point up in rank, negative links down.
      bool forward = positive_sign == lower(u, v);
      if (coin(rng, params.status_noise)) forward = !forward;
      const Pair e = forward ? Pair{u, v} : Pair{v, u};
      if (positive_sign) {
        positive.insert(e);
        if (coin(rng, params.reciprocity)) positive.insert({e.dst, e.src});
      } else {
        negative.insert(e);
        if (same)
          mild.insert(e);
        else
          feuds.push_back(e);
      }
    }
  }
  // Long-range friendships make the network small: random pairs, not only
  // enemies, end up a few hops apart.
  for (UserId u = 0; u < m; ++u)
    for (auto k = poisson(rng, params.shortcuts); k > 0; --k) {
      const auto v = static_cast<UserId>(uniform_index(rng, static_cast<std::uint64_t>(m)));
      if (v == u || positive.contains({u, v}) || positive.contains({v, u}) || negative.contains({u, v}) ||
          negative.contains({v, u}))
        continue;
      bool forward = lower(u, v);
      if (coin(rng, params.status_noise)) forward = !forward;
      const Pair e = forward ? Pair{u, v} : Pair{v, u};
      positive.insert(e);
      if (coin(rng, params.reciprocity)) positive.insert({e.dst, e.src});
    }
  std::vector<std::vector<UserId>> followers(static_cast<std::size_t>(m));
  for (const auto& e : positive) followers[static_cast<std::size_t>(e.dst)].push_back(e.src);
  auto linked = [&](UserId a, UserId b) {
    return positive.contains({a, b}) || positive.contains({b, a}) || negative.contains({a, b}) ||
           negative.contains({b, a});
  };
  // Across factions, whoever looks down on v also looks down on those who
  // look up to v.
  for (const auto& e : feuds)
    for (auto k : followers[static_cast<std::size_t>(e.dst)]) {
      if (k == e.src || linked(e.src, k) || !coin(rng, params.closure_probability)) continue;
      negative.insert({e.src, k});
      mild.insert({e.src, k});
    }

  return out;
}

double balanced_ratio(const Links& links, std::int32_t users) {
  std::vector<Pair> positive(links.positive.begin(), links.positive.end());
  std::vector<WeightedEdge> negative;
  for (const auto& e : links.negative)
    if (!links.positive.contains(e)) negative.push_back({e.src, e.dst, 1.0});
  return analysis::triad_census(SignedNetwork(PositiveNetwork(users, positive), negative)).balanced_ratio.value_or(1.0);
}

}  // namespace

PlantedDataset generate_planted(const PlantedParams& params, std::uint64_t seed) {
  params.validate();
  const auto m = params.users;
  // Bridges and spreading leave some triads unbalanced before any noise, so
  // the flip rate is fitted to a noise-free draw of the same links.
  const double structural = balanced_ratio(draw_links(params, seed, 0.0), m);
  auto [positive, negative, mild] = draw_links(params, seed, flip_probability(params.balanced_fraction, structural));
  Rng rng(derive_seed(seed, "planted.content"));

  std::vector<std::vector<PostId>> posts_of(static_cast<std::size_t>(m));
  std::vector<UserId> author;
  for (UserId u = 0; u < m; ++u) {
    const auto count = 1 + poisson(rng, params.posts_mean);
    for (std::int64_t k = 0; k < count; ++k) {
      posts_of[static_cast<std::size_t>(u)].push_back(static_cast<PostId>(author.size()));
      author.push_back(u);
    }
  }

  std::vector<InteractionData::Opinion> opinions;
  std::unordered_set<Pair, PairHash> voiced;
  auto voice = [&](UserId u, PostId p, std::int8_t v) {
    if (author[static_cast<std::size_t>(p)] == u) return;
    if (voiced.insert({u, p}).second) opinions.push_back({u, p, v});
  };
  for (const auto& e : negative) {
    const double q = mild.contains(e) ? params.mild_dislike_probability : params.dislike_probability;
    for (auto p : posts_of[static_cast<std::size_t>(e.dst)])
      if (coin(rng, q)) voice(e.src, p, -1);
  }
  for (const auto& e : positive)
    for (auto p : posts_of[static_cast<std::size_t>(e.dst)]) {
      const double draw = uniform_real(rng);
      if (draw < params.like_probability)
        voice(e.src, p, 1);
      else if (draw < params.like_probability + params.friend_dislike_probability)
        voice(e.src, p, -1);
    }
  const auto num_posts = author.size();
  for (UserId u = 0; u < m; ++u) {
    for (auto k = poisson(rng, params.background_dislikes); k > 0; --k)
      voice(u, static_cast<PostId>(uniform_index(rng, num_posts)), -1);
    for (auto k = poisson(rng, params.background_likes); k > 0; --k)
      voice(u, static_cast<PostId>(uniform_index(rng, num_posts)), 1);
  }
  std::sort(opinions.begin(), opinions.end(), [](const auto& a, const auto& b) {
    return a.user != b.user ? a.user < b.user : a.post < b.post;
  });

  PlantedDataset out;
  auto& b = out.bundle;
  b.name = "planted";
  std::string users = "#user\n";
  for (UserId u = 0; u < m; ++u) users += std::to_string(u) + "\n";
  b.users = Source{"planted/users.tsv", std::move(users)};
  b.positive = {"planted/positive.tsv", "#src\tdst\n"};
  for (const auto& e : positive) b.positive.text += std::to_string(e.src) + "\t" + std::to_string(e.dst) + "\n";
  b.authorship = {"planted/authorship.tsv", "#user\tpost\n"};
  for (std::size_t p = 0; p < num_posts; ++p)
    b.authorship.text += std::to_string(author[p]) + "\t" + std::to_string(p) + "\n";
  b.opinions = {"planted/opinions.tsv", "#user\tpost\tvalue\n"};
  for (const auto& o : opinions)
    b.opinions.text +=
        std::to_string(o.user) + "\t" + std::to_string(o.post) + "\t" + std::to_string(int{o.value}) + "\n";
  Source truth{"planted/truth.tsv", "#src\tdst\n"};
  for (const auto& e : negative) truth.text += std::to_string(e.src) + "\t" + std::to_string(e.dst) + "\n";
  b.truth = std::move(truth);
  out.negatives.assign(negative.begin(), negative.end());
  return out;
}

}  // namespace nelp::io
