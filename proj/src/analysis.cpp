#include "nelp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"
#include "nelp/util.hpp"

namespace nelp::analysis {

using Json = nlohmann::ordered_json;

std::size_t PathLengthHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0}) + beyond_cap + unreachable;
}

std::vector<double> PathLengthHistogram::ratios() const {
  std::vector<double> r;
  const auto n = static_cast<double>(total());
  if (n == 0) return r;
  for (auto c : counts) r.push_back(static_cast<double>(c) / n);
  r.push_back(static_cast<double>(beyond_cap) / n);
  r.push_back(static_cast<double>(unreachable) / n);
  return r;
}

double PathLengthHistogram::within(int hops) const {
  const auto n = total();
  if (n == 0) return 0.0;
  std::size_t c = 0;
  for (int k = 0; k < std::min<int>(hops, cap); ++k) c += counts[static_cast<std::size_t>(k)];
  return static_cast<double>(c) / static_cast<double>(n);
}

PathLengthHistogram enemy_path_distribution(const PositiveNetwork& g_p, std::span<const Pair> negatives, int cap) {
  if (negatives.empty()) throw std::invalid_argument("enemy_path_distribution: no negative links to analyze");
  if (cap < 1) throw std::invalid_argument("enemy_path_distribution: cap < 1");
  std::map<UserId, std::vector<UserId>> by_source;
  for (const auto& p : negatives) {
    g_p.check_user(p.src);
    g_p.check_user(p.dst);
    if (p.src == p.dst) throw std::invalid_argument("enemy_path_distribution: self-loop in negative links");
    by_source[p.src].push_back(p.dst);
  }
  PathLengthHistogram h;
  h.cap = cap;
  h.counts.assign(static_cast<std::size_t>(cap), 0);
  for (const auto& [src, targets] : by_source) {
    // Uncapped BFS separates "beyond cap" from "no path".
    auto dist = bfs_distances(g_p, src, g_p.num_users(), Direction::Directed);
    for (auto dst : targets) {
      auto d = dist[static_cast<std::size_t>(dst)];
      if (d < 0)
        ++h.unreachable;
      else if (d > cap)
        ++h.beyond_cap;
      else
        ++h.counts[static_cast<std::size_t>(d - 1)];
    }
  }
  return h;
}

TriadReport triad_census(const SignedNetwork& g) {
  TriadReport report;
  report.conflicting_pairs = for_each_triad(g, TriadMode::UndirectedSigns, [&](const Triad& t) {
    int neg = 0;
    for (const auto& l : t.links)
      if (*l.undirected == Sign::Negative) ++neg;
    ++report.by_negatives[static_cast<std::size_t>(neg)];
    ++report.total;
  });
  for_each_triad(g, TriadMode::DirectedSigned, [&](const Triad& t) {
    ++report.directed_total;
    if (satisfies_status(t)) ++report.status_satisfied;
  });
  if (report.total > 0)
    report.balanced_ratio =
        static_cast<double>(report.by_negatives[0] + report.by_negatives[2]) / static_cast<double>(report.total);
  if (report.directed_total > 0)
    report.status_ratio = static_cast<double>(report.status_satisfied) / static_cast<double>(report.directed_total);
  return report;
}

TTestResult welch_t_test(std::span<const double> s, std::span<const double> r) {
  if (s.size() < 2 || r.size() < 2) throw std::invalid_argument("welch_t_test: each sample needs at least 2 values");
  auto moments = [](std::span<const double> x) {
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (auto v : x) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / static_cast<double>(x.size() - 1)};
  };
  auto [ms, vs] = moments(s);
  auto [mr, vr] = moments(r);
  const double ns = static_cast<double>(s.size());
  const double nr = static_cast<double>(r.size());
  const double as = vs / ns;
  const double ar = vr / nr;
  const double se2 = as + ar;
  TTestResult result;
  if (se2 == 0.0) {
    if (ms == mr) throw std::invalid_argument("welch_t_test: both samples constant and equal");
    result.t = ms > mr ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    result.degrees_of_freedom = ns + nr - 2.0;
    result.p_one_sided = ms > mr ? 0.0 : 1.0;
    return result;
  }
  result.t = (ms - mr) / std::sqrt(se2);
  double denom = 0.0;
  if (as > 0) denom += as * as / (ns - 1.0);
  if (ar > 0) denom += ar * ar / (nr - 1.0);
  result.degrees_of_freedom = se2 * se2 / denom;
  boost::math::students_t dist(result.degrees_of_freedom);
  result.p_one_sided = boost::math::cdf(boost::math::complement(dist, result.t));
  return result;
}

double random_pair_ratio(std::size_t negatives, std::int64_t users) {
  if (users < 2) throw std::invalid_argument("random_pair_ratio: fewer than 2 users");
  return static_cast<double>(negatives) / (static_cast<double>(users) * static_cast<double>(users - 1));
}

CorrelationReport interaction_link_correlation(const InteractionMatrix& n, std::span<const Pair> negatives,
                                               const CorrelationOptions& options) {
  const auto m = n.num_users();
  std::unordered_set<Pair, PairHash> truth(negatives.begin(), negatives.end());
  CorrelationReport report;
  Rng rng(options.seed);

  std::vector<std::int32_t> counts;
  std::vector<bool> linked;
  for (UserId i = 0; i < m; ++i) {
    auto cols = n.row_cols(i);
    auto cnt = n.row_counts(i);
    std::vector<UserId> targets;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (cols[k] == i) continue;
      targets.push_back(cols[k]);
      counts.push_back(cnt[k]);
      linked.push_back(truth.contains({i, cols[k]}));
    }
    if (targets.empty()) continue;
    // Matched users without negative interactions from i, drawn without
    // replacement for this source.
    std::vector<UserId> pool;
    pool.reserve(static_cast<std::size_t>(m));
    for (UserId k = 0; k < m; ++k)
      if (k != i && !std::binary_search(cols.begin(), cols.end(), k)) pool.push_back(k);
    if (pool.size() < targets.size())
      throw std::invalid_argument("interaction_link_correlation: not enough non-interacting users to match");
    for (std::size_t t = 0; t < targets.size(); ++t) {
      auto pick = t + uniform_index(rng, pool.size() - t);
      std::swap(pool[t], pool[pick]);
      report.s.push_back(truth.contains({i, targets[t]}) ? 1.0 : 0.0);
      report.r.push_back(truth.contains({i, pool[t]}) ? 1.0 : 0.0);
    }
  }
  report.interacting_pairs = report.s.size();
  if (report.interacting_pairs < 2)
    throw std::invalid_argument("interaction_link_correlation: fewer than 2 pairs with negative interactions");
  report.test = welch_t_test(report.s, report.r);
  report.significant = report.test.p_one_sided < report.alpha;

  const std::int32_t max_count = *std::max_element(counts.begin(), counts.end());
  int k_max = options.k_max;
  std::vector<std::size_t> qualifying(static_cast<std::size_t>(max_count) + 1, 0);
  std::vector<std::size_t> hits(static_cast<std::size_t>(max_count) + 1, 0);
  for (std::size_t p = 0; p < counts.size(); ++p) {
    // Pairs with count c qualify for every K <= c.
    ++qualifying[static_cast<std::size_t>(counts[p])];
    if (linked[p]) ++hits[static_cast<std::size_t>(counts[p])];
  }
  for (auto k = static_cast<std::size_t>(max_count); k > 1; --k) {
    qualifying[k - 1] += qualifying[k];
    hits[k - 1] += hits[k];
  }
  if (k_max <= 0) {
    k_max = 1;
    for (int k = 1; k <= max_count; ++k)
      if (qualifying[static_cast<std::size_t>(k)] >= options.min_pairs_per_k) k_max = k;
  }
  k_max = std::min(k_max, max_count);
  for (int k = 1; k <= k_max; ++k) {
    auto q = qualifying[static_cast<std::size_t>(k)];
    report.qualifying.push_back(q);
    report.ratio_curve.push_back(q == 0 ? 0.0 : static_cast<double>(hits[static_cast<std::size_t>(k)]) /
                                                    static_cast<double>(q));
  }
  report.random_baseline = random_pair_ratio(negatives.size(), m);
  return report;
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

std::string to_json(const PathLengthHistogram& h) {
  Json j;
  j["cap"] = h.cap;
  j["total"] = h.total();
  Json buckets = Json::array();
  auto ratios = h.ratios();
  for (int k = 0; k < h.cap; ++k)
    buckets.push_back({{"length", std::to_string(k + 1)},
                       {"count", h.counts[static_cast<std::size_t>(k)]},
                       {"ratio", ratios.empty() ? 0.0 : ratios[static_cast<std::size_t>(k)]}});
  buckets.push_back({{"length", ">" + std::to_string(h.cap)},
                     {"count", h.beyond_cap},
                     {"ratio", ratios.empty() ? 0.0 : ratios[static_cast<std::size_t>(h.cap)]}});
  buckets.push_back({{"length", "inf"},
                     {"count", h.unreachable},
                     {"ratio", ratios.empty() ? 0.0 : ratios[static_cast<std::size_t>(h.cap) + 1]}});
  j["buckets"] = buckets;
  return j.dump(2);
}

std::string to_csv(const PathLengthHistogram& h) {
  std::ostringstream os;
  os.precision(10);
  os << "length,count,ratio\n";
  auto ratios = h.ratios();
  for (int k = 0; k < h.cap; ++k)
    os << k + 1 << ',' << h.counts[static_cast<std::size_t>(k)] << ','
       << (ratios.empty() ? 0.0 : ratios[static_cast<std::size_t>(k)]) << '\n';
  os << '>' << h.cap << ',' << h.beyond_cap << ',' << (ratios.empty() ? 0.0 : ratios[static_cast<std::size_t>(h.cap)])
     << '\n';
  os << "inf," << h.unreachable << ',' << (ratios.empty() ? 0.0 : ratios[static_cast<std::size_t>(h.cap) + 1])
     << '\n';
  return os.str();
}

std::string to_json(const TriadReport& r) {
  Json j;
  j["total"] = r.total;
  j["combinations"] = {{"+++", r.by_negatives[0]},
                       {"++-", r.by_negatives[1]},
                       {"+--", r.by_negatives[2]},
                       {"---", r.by_negatives[3]}};
  j["conflicting_pairs_excluded"] = r.conflicting_pairs;
  j["balanced_ratio"] = optional_number(r.balanced_ratio);
  j["directed_total"] = r.directed_total;
  j["status_satisfied"] = r.status_satisfied;
  j["status_ratio"] = optional_number(r.status_ratio);
  return j.dump(2);
}

std::string to_json(const CorrelationReport& r) {
  Json j;
  j["interacting_pairs"] = r.interacting_pairs;
  j["mean_s"] = std::accumulate(r.s.begin(), r.s.end(), 0.0) / static_cast<double>(r.s.size());
  j["mean_r"] = std::accumulate(r.r.begin(), r.r.end(), 0.0) / static_cast<double>(r.r.size());
  // JSON has no infinity; degenerate tests are reported as strings.
  if (std::isfinite(r.test.t))
    j["t"] = r.test.t;
  else
    j["t"] = r.test.t > 0 ? "inf" : "-inf";
  j["degrees_of_freedom"] = r.test.degrees_of_freedom;
  j["p_one_sided"] = r.test.p_one_sided;
  j["alpha"] = r.alpha;
  j["significant"] = r.significant;
  Json curve = Json::array();
  for (std::size_t k = 0; k < r.ratio_curve.size(); ++k)
    curve.push_back({{"k", k + 1}, {"pairs", r.qualifying[k]}, {"ratio", r.ratio_curve[k]}});
  j["ratio_curve"] = curve;
  j["random_baseline"] = r.random_baseline;
  return j.dump(2);
}

std::string to_csv(const CorrelationReport& r) {
  std::ostringstream os;
  os.precision(10);
  os << "k,pairs,ratio,random_baseline\n";
  for (std::size_t k = 0; k < r.ratio_curve.size(); ++k)
    os << k + 1 << ',' << r.qualifying[k] << ',' << r.ratio_curve[k] << ',' << r.random_baseline << '\n';
  return os.str();
}

}  // namespace nelp::analysis
