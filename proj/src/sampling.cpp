#include "nelp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "nelp/text.hpp"
#include "nelp/util.hpp"

namespace nelp::sampling {

void SamplingConfig::validate() const {
  if (!(closure_weight >= 0.0 && closure_weight <= 1.0)) throw std::invalid_argument("closure weight r must lie in [0,1]");
  if (!(positive_ratio >= 1.0)) throw std::invalid_argument("positive-to-negative sample ratio must be >= 1");
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Interaction:
      return "interaction";
    case Provenance::StatusClosure:
      return "closure";
    case Provenance::Random:
      return "random";
  }
  return "random";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "interaction") return Provenance::Interaction;
  if (s == "closure") return Provenance::StatusClosure;
  if (s == "random") return Provenance::Random;
  throw std::invalid_argument("unknown provenance: " + std::string(s));
}

double reliability_weight(std::int64_t n, const SamplingConfig& cfg) {
  if (n < 0) throw std::invalid_argument("reliability_weight: negative interaction count");
  if (cfg.weight_mode == WeightMode::Uniform) return 1.0;
  if (n == 0) return cfg.closure_weight;
  return std::clamp(1.0 - 1.0 / std::log2(1.0 + static_cast<double>(n)), 0.0, 1.0);
}

namespace {

// Status check of every triad through `edge` in g, with `edge` taken to carry
// `as` whether or not g already holds it.
bool status_consistent(const SignedNetwork& g, Pair edge, Sign as = Sign::Negative) {
  auto sign = [&](UserId a, UserId b) -> std::optional<Sign> {
    if (a == edge.src && b == edge.dst) return as;
    return g.edge_sign(a, b);
  };
  auto ni = g.neighbors(edge.src);
  auto nk = g.neighbors(edge.dst);
  auto i = ni.begin();
  auto k = nk.begin();
  while (i != ni.end() && k != nk.end()) {
    if (*i < *k) {
      ++i;
    } else if (*k < *i) {
      ++k;
    } else {
      const UserId w = *i;
      ++i;
      ++k;
      if (w == edge.src || w == edge.dst) continue;
      Triad t;
      t.nodes = {edge.src, edge.dst, w};
      std::sort(t.nodes.begin(), t.nodes.end());
      auto fill = [&](TriadLink& l, UserId a, UserId b) {
        l.forward = sign(a, b);
        l.backward = sign(b, a);
      };
      fill(t.links[0], t.nodes[0], t.nodes[1]);
      fill(t.links[1], t.nodes[1], t.nodes[2]);
      fill(t.links[2], t.nodes[0], t.nodes[2]);
      if (!satisfies_status(t)) return false;
    }
  }
  return true;
}

SignedNetwork signed_view(const PositiveNetwork& g_p, std::span<const Pair> negatives) {
  std::vector<WeightedEdge> edges;
  edges.reserve(negatives.size());
  for (const auto& p : negatives) edges.push_back({p.src, p.dst, 1.0});
  return SignedNetwork(g_p, edges);
}

}  // namespace

std::vector<Pair> interaction_candidates(const PositiveNetwork& g_p, const InteractionMatrix& n) {
  std::vector<Pair> seed;
  for (UserId i = 0; i < n.num_users(); ++i)
    for (auto j : n.row_cols(i))
      if (j != i && !g_p.has_edge(i, j)) seed.push_back({i, j});
  return seed;
}

std::vector<Pair> status_violators(const PositiveNetwork& g_p, std::span<const Pair> candidates) {
  auto g = signed_view(g_p, candidates);
  std::vector<Pair> violators;
  for (const auto& p : candidates)
    if (!status_consistent(g, p)) violators.push_back(p);
  return violators;
}

std::vector<Sample> weigh_negatives(std::span<const Pair> pairs, const InteractionMatrix& n,
                                    const SamplingConfig& cfg) {
  std::vector<Sample> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    auto count = n.at(p.src, p.dst);
    out.push_back({p, -1, reliability_weight(count, cfg),
                   count > 0 ? Provenance::Interaction : Provenance::StatusClosure});
  }
  return out;
}

NegativeSampleResult construct_negative_samples(const PositiveNetwork& g_p, const InteractionMatrix& n,
                                                const SamplingConfig& cfg) {
  cfg.validate();
  NegativeSampleResult result;
  result.seed = interaction_candidates(g_p, n);

  // Removal is judged on the graph holding every seed pair.
  result.removed = status_violators(g_p, result.seed);
  std::vector<Pair> kept;
  std::set_difference(result.seed.begin(), result.seed.end(), result.removed.begin(), result.removed.end(),
                      std::back_inserter(kept));

  // Single addition pass against the post-removal graph; additions do not
  // see each other.
  auto g = signed_view(g_p, kept);
  std::vector<Pair> candidates;
  auto reliable = cfg;
  reliable.weight_mode = WeightMode::Reliability;
  auto unreliable = [&](UserId a, UserId b) {
    return g.has_negative(a, b) && reliability_weight(n.at(a, b), reliable) <= 0.0;
  };
  for (const auto& e : kept) {
    // Only reliable samples (f(N) > 0) may imply further negatives, on
    // either leg of the open triad.
    if (unreliable(e.src, e.dst)) continue;
    for (auto k : g.neighbors(e.dst)) {
      if (k == e.src || unreliable(e.dst, k) || unreliable(k, e.dst)) continue;
      if (g.positive().linked(e.src, k) || g.has_negative(e.src, k) || g.has_negative(k, e.src)) continue;
      candidates.push_back({e.src, k});
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  for (const auto& c : candidates) {
    if (std::binary_search(result.removed.begin(), result.removed.end(), c)) continue;
    // The status order must imply the link: the reverse orientation (a
    // positive i->k) has to break some triad.
    if (status_consistent(g, c) && !status_consistent(g, c, Sign::Positive)) result.added.push_back(c);
  }

  std::vector<Pair> final_pairs = kept;
  final_pairs.insert(final_pairs.end(), result.added.begin(), result.added.end());
  std::sort(final_pairs.begin(), final_pairs.end());
  result.negatives.reserve(final_pairs.size());
  for (const auto& p : final_pairs) {
    bool closure = std::binary_search(result.added.begin(), result.added.end(), p);
    auto count = closure ? 0 : n.at(p.src, p.dst);
    result.negatives.push_back({p, -1, reliability_weight(count, cfg),
                                closure ? Provenance::StatusClosure : Provenance::Interaction});
  }
  return result;
}

std::vector<Sample> sample_positive_pairs(std::int32_t num_users, const PositiveNetwork& g_p,
                                          std::span<const Sample> negatives, const SamplingConfig& cfg) {
  cfg.validate();
  if (num_users != g_p.num_users()) throw std::invalid_argument("sample_positive_pairs: user count mismatch");
  std::unordered_set<Pair, PairHash> excluded;
  for (const auto& s : negatives) excluded.insert(s.pair);
  std::size_t negatives_off_graph = 0;
  for (const auto& p : excluded)
    if (!g_p.has_edge(p.src, p.dst) && p.src != p.dst) ++negatives_off_graph;

  const auto m = static_cast<std::uint64_t>(num_users);
  const std::uint64_t total = m * (m > 0 ? m - 1 : 0);
  const std::uint64_t available = total - g_p.num_edges() - negatives_off_graph;
  const auto wanted = static_cast<std::uint64_t>(std::llround(cfg.positive_ratio * static_cast<double>(negatives.size())));
  if (wanted > available)
    throw std::invalid_argument("sample_positive_pairs: graph too dense to supply " + std::to_string(wanted) +
                                " missing-link pairs (" + std::to_string(available) + " available)");

  Rng rng(cfg.seed);
  auto usable = [&](Pair p) { return p.src != p.dst && !g_p.has_edge(p.src, p.dst) && !excluded.contains(p); };
  std::vector<Pair> chosen;
  chosen.reserve(wanted);
  if (wanted * 2 > available) {
    std::vector<Pair> pool;
    pool.reserve(available);
    for (UserId i = 0; i < num_users; ++i)
      for (UserId j = 0; j < num_users; ++j)
        if (usable({i, j})) pool.push_back({i, j});
    for (std::uint64_t t = 0; t < wanted; ++t) {
      auto pick = t + uniform_index(rng, pool.size() - t);
      std::swap(pool[t], pool[pick]);
      chosen.push_back(pool[t]);
    }
  } else {
    std::unordered_set<Pair, PairHash> seen;
    while (chosen.size() < wanted) {
      Pair p{static_cast<UserId>(uniform_index(rng, m)), static_cast<UserId>(uniform_index(rng, m))};
      if (!usable(p) || !seen.insert(p).second) continue;
      chosen.push_back(p);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Sample> out;
  out.reserve(chosen.size());
  for (const auto& p : chosen) out.push_back({p, +1, 1.0, Provenance::Random});
  return out;
}

std::string to_tsv(const SampleSet& samples, const IdMap& users) {
  std::ostringstream os;
  os << "#src\tdst\tlabel\tweight\tprovenance\n";
  auto emit = [&](const Sample& s) {
    os << users.name(s.pair.src) << '\t' << users.name(s.pair.dst) << '\t' << (s.label > 0 ? "+1" : "-1") << '\t'
       << format_double(s.weight) << '\t' << to_string(s.provenance) << '\n';
  };
  for (const auto& s : samples.negatives) emit(s);
  for (const auto& s : samples.positives) emit(s);
  return os.str();
}

SampleSet from_tsv(std::string_view text, const IdMap& users) {
  SampleSet set;
  for_each_record(text, "samples", [&](std::size_t line, std::span<const std::string_view> fields) {
    if (fields.size() != 5) throw InputError("samples", line, "expected 5 columns");
    auto lookup = [&](std::string_view name) {
      auto id = users.find(std::string(name));
      if (!id) throw InputError("samples", line, "unknown user " + std::string(name));
      return *id;
    };
    Sample s;
    s.pair = {lookup(fields[0]), lookup(fields[1])};
    s.label = parse_int(fields[2], "samples", line) > 0 ? +1 : -1;
    s.weight = parse_double(fields[3], "samples", line);
    s.provenance = provenance_from_string(fields[4]);
    (s.label < 0 ? set.negatives : set.positives).push_back(s);
  });
  return set;
}

}  // namespace nelp::sampling
