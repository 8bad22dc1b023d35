#include "nelp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "nelp/text.hpp"
#include "nelp/util.hpp"

namespace nelp::eval {

Metrics metrics_from(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  const double tp = static_cast<double>(c.tp);
  m.precision = c.tp + c.fp > 0 ? tp / static_cast<double>(c.tp + c.fp) : 0.0;
  m.recall = c.tp + c.fn > 0 ? tp / static_cast<double>(c.tp + c.fn) : 0.0;
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

Metrics evaluate(std::span<const Pair> universe, std::span<const int> predictions, std::span<const Pair> truth) {
  if (universe.size() != predictions.size()) throw std::invalid_argument("evaluate: one prediction per pair required");
  std::unordered_set<Pair, PairHash> negatives(truth.begin(), truth.end());
  std::unordered_set<Pair, PairHash> in_universe(universe.begin(), universe.end());
  for (const auto& t : negatives)
    if (!in_universe.contains(t)) throw std::invalid_argument("evaluate: truth pair outside the evaluation universe");
  Confusion c;
  for (std::size_t k = 0; k < universe.size(); ++k) {
    const int y = predictions[k];
    if (y != 1 && y != -1) throw std::invalid_argument("evaluate: predictions must be +1 or -1");
    const bool actual = negatives.contains(universe[k]);
    if (y == -1)
      (actual ? c.tp : c.fp)++;
    else
      (actual ? c.fn : c.tn)++;
  }
  return metrics_from(c);
}

std::vector<int> baseline_random(std::span<const Pair> universe, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw std::invalid_argument("random baseline rate must lie in [0,1]");
  Rng rng(seed);
  std::vector<int> out(universe.size());
  for (auto& y : out) y = uniform_real(rng) < rate ? -1 : 1;
  return out;
}

std::vector<int> baseline_spath(std::span<const Pair> universe, const PositiveNetwork& g_p, int length,
                                unsigned threads) {
  if (length < 1) throw std::invalid_argument("sPath length must be >= 1");
  std::vector<int> out(universe.size(), 1);
  std::vector<UserId> sources;
  for (const auto& p : universe) sources.push_back(p.src);
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  std::vector<std::vector<int>> dist(sources.size());
  parallel_for(sources.size(), threads,
               [&](std::size_t s) { dist[s] = bfs_distances(g_p, sources[s], length, Direction::Directed); });
  for (std::size_t k = 0; k < universe.size(); ++k) {
    auto s = static_cast<std::size_t>(std::lower_bound(sources.begin(), sources.end(), universe[k].src) - sources.begin());
    if (dist[s][static_cast<std::size_t>(universe[k].dst)] == length) out[k] = -1;
  }
  return out;
}

std::vector<int> baseline_negin(std::span<const Pair> universe, const InteractionMatrix& n) {
  std::vector<int> out(universe.size(), 1);
  for (std::size_t k = 0; k < universe.size(); ++k)
    if (universe[k].src != universe[k].dst && n.at(universe[k].src, universe[k].dst) != 0) out[k] = -1;
  return out;
}

std::vector<int> membership(std::span<const Pair> universe, std::span<const Pair> negatives) {
  std::vector<int> out(universe.size(), 1);
  for (std::size_t k = 0; k < universe.size(); ++k)
    if (std::binary_search(negatives.begin(), negatives.end(), universe[k])) out[k] = -1;
  return out;
}

PipelineOptions PipelineOptions::from(const RunConfig& config) {
  PipelineOptions o;
  o.sampling = config.sampling_config();
  o.kernel = {config.kernel, config.rbf_bandwidth};
  o.solver.tolerance = config.tolerance;
  o.solver.max_sweeps = config.max_sweeps;
  o.path_cap = config.path_cap;
  o.max_unlabeled = config.max_unlabeled;
  o.threads = config.threads;
  o.seed = config.seed;
  return o;
}

Pipeline::Pipeline(const io::Dataset& data, const PipelineOptions& options, NegativeSource source)
    : data_(data), options_(options) {
  const auto& g = data.positive;
  n_ = compute_negative_interactions(data.interactions);
  // Features always see reliability weights; the weight mode only changes costs.
  auto view_cfg = options_.sampling;
  view_cfg.weight_mode = sampling::WeightMode::Reliability;
  if (source == NegativeSource::NegInS) {
    ns_ = sampling::construct_negative_samples(g, n_, view_cfg);
  } else {
    ns_.seed = sampling::interaction_candidates(g, n_);
    ns_.negatives = sampling::weigh_negatives(ns_.seed, n_, view_cfg);
  }
  if (ns_.negatives.empty()) throw std::invalid_argument("no negative samples: the data has no negative interactions");
  for (const auto& s : ns_.negatives) ns_pairs_.push_back(s.pair);

  auto ps_cfg = options_.sampling;
  ps_cfg.seed = derive_seed(options_.seed, "positives");
  ps_ = sampling::sample_positive_pairs(g.num_users(), g, ns_.negatives, ps_cfg);

  std::vector<WeightedEdge> edges;
  for (const auto& s : ns_.negatives) edges.push_back({s.pair.src, s.pair.dst, s.weight});
  view_ = SignedNetwork(g, edges);
  extractor_ = std::make_unique<features::FeatureExtractor>(view_, data.interactions,
                                                            features::ExtractorOptions{options_.path_cap, options_.threads});

  std::vector<Pair> pairs = ns_pairs_;
  for (const auto& s : ps_) pairs.push_back(s.pair);
  auto unlabeled =
      solver::regularizer_candidates(g, pairs, options_.max_unlabeled, derive_seed(options_.seed, "unlabeled"));
  candidates_ = unlabeled.size();
  pairs.insert(pairs.end(), unlabeled.begin(), unlabeled.end());
  rows_ = extractor_->extract(pairs);
}

TrainedModel Pipeline::train(const solver::Hyperparameters& hyper) const {
  auto cost_cfg = options_.sampling;
  cost_cfg.weight_mode = hyper.weight_mode;
  const auto n_ns = ns_.negatives.size();
  const auto n_ps = ps_.size();

  std::vector<Eigen::Index> labeled_rows, unlabeled_rows;
  solver::TrainingProblem problem;
  problem.kernel = options_.kernel;
  problem.balance_weight = hyper.balance_weight;
  for (std::size_t k = 0; k < n_ns; ++k) {
    const auto& s = ns_.negatives[k];
    const auto count = s.provenance == sampling::Provenance::StatusClosure ? 0 : n_.at(s.pair.src, s.pair.dst);
    const double cost = hyper.negative_cost * sampling::reliability_weight(count, cost_cfg);
    if (cost > 0.0) {
      labeled_rows.push_back(static_cast<Eigen::Index>(k));
      problem.labels.push_back(-1);
      problem.costs.push_back(cost);
    } else {
      unlabeled_rows.push_back(static_cast<Eigen::Index>(k));
    }
  }
  for (std::size_t k = 0; k < n_ps; ++k) {
    labeled_rows.push_back(static_cast<Eigen::Index>(n_ns + k));
    problem.labels.push_back(1);
    problem.costs.push_back(hyper.positive_cost);
  }
  for (std::size_t k = n_ns + n_ps; k < rows_.pairs.size(); ++k) unlabeled_rows.push_back(static_cast<Eigen::Index>(k));

  std::vector<Eigen::Index> order = labeled_rows;
  order.insert(order.end(), unlabeled_rows.begin(), unlabeled_rows.end());
  features::RowMatrix raw(static_cast<Eigen::Index>(order.size()), rows_.values.cols());
  std::vector<Pair> pairs(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    raw.row(static_cast<Eigen::Index>(r)) = rows_.values.row(order[r]);
    pairs[r] = rows_.pairs[static_cast<std::size_t>(order[r])];
  }
  auto stats = features::fit_standardization(raw.topRows(static_cast<Eigen::Index>(labeled_rows.size())));
  problem.x = stats.apply(raw);
  auto reg = solver::build_balance_matrix(pairs, data_.positive);

  TrainedModel out;
  out.solution = solver::solve_dual(problem, reg, options_.solver);
  out.model = solver::make_model(problem, out.solution, std::move(stats), hyper);
  out.labeled = labeled_rows.size();
  out.unlabeled = unlabeled_rows.size();
  out.couplings = static_cast<std::size_t>(reg.coupling.nonZeros());
  return out;
}

features::FeatureMatrix Pipeline::features(std::span<const Pair> pairs) const { return extractor_->extract(pairs); }

std::vector<solver::Prediction> Pipeline::predict(const solver::Model& model, std::span<const Pair> pairs) const {
  auto m = extractor_->extract(pairs);
  return solver::predict_raw(model, m.values, features::kSchemaVersion, options_.threads);
}

Universe build_universe(const io::Dataset& data, const io::GroundTruth& truth, std::span<const Pair> negin,
                        std::span<const Pair> negins, double missing_ratio, std::uint64_t seed) {
  if (!(missing_ratio >= 0.0)) throw std::invalid_argument("missing ratio must be >= 0");
  std::set<Pair> all(truth.negatives.begin(), truth.negatives.end());
  all.insert(negin.begin(), negin.end());
  all.insert(negins.begin(), negins.end());
  Universe u;
  u.truth = truth.negatives.size();
  u.interaction = negin.size();
  u.refined = negins.size();

  const auto& g = data.positive;
  const auto m = static_cast<std::uint64_t>(data.users.size());
  const auto wanted = static_cast<std::size_t>(std::llround(missing_ratio * static_cast<double>(truth.negatives.size())));
  std::size_t taken = 0;
  for (const auto& p : all)
    if (!g.has_edge(p.src, p.dst)) ++taken;
  const std::uint64_t available = m * (m - 1) - g.num_edges() - taken;
  if (wanted > available / 2)
    throw std::invalid_argument("graph too small to draw " + std::to_string(wanted) + " missing pairs");
  Rng rng(seed);
  while (u.missing < wanted) {
    Pair p{static_cast<UserId>(uniform_index(rng, m)), static_cast<UserId>(uniform_index(rng, m))};
    if (p.src == p.dst || g.has_edge(p.src, p.dst)) continue;
    if (all.insert(p).second) ++u.missing;
  }
  u.pairs.assign(all.begin(), all.end());
  u.definition = "truth negatives + pairs with negative interactions + refined negative samples + " +
                 format_double(missing_ratio) + " x |truth| uniformly drawn non-linked pairs";
  return u;
}

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::pair<std::string, std::string>> base_metadata(const RunConfig& config, const Universe& u) {
  return {{"seed", std::to_string(config.seed)},
          {"config_hash", config_hash(config)},
          {"universe_size", std::to_string(u.pairs.size())},
          {"universe_truth", std::to_string(u.truth)},
          {"universe_interaction_pairs", std::to_string(u.interaction)},
          {"universe_refined_pairs", std::to_string(u.refined)},
          {"universe_missing_pairs", std::to_string(u.missing)},
          {"universe_definition", u.definition},
          {"protocol", "ground truth is used only to score predictions; no train/test split of the truth"}};
}

std::vector<int> labels_of(const std::vector<solver::Prediction>& p) {
  std::vector<int> out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = p[k].label;
  return out;
}

std::string cb_label(double v) { return "C_b=" + format_double(v); }

}  // namespace

Report run_comparison(const io::Dataset& data, const io::GroundTruth& truth, const RunConfig& config) {
  auto options = PipelineOptions::from(config);
  Pipeline refined(data, options, NegativeSource::NegInS);
  Pipeline plain(data, options, NegativeSource::NegIn);
  const auto& ns = refined.negative_samples();
  auto universe = build_universe(data, truth, ns.seed, refined.negative_pairs(), config.missing_ratio,
                                 derive_seed(config.seed, "universe"));
  const auto& pairs = universe.pairs;

  Report r;
  r.kind = "comparison";
  r.dataset = data.name;
  r.rows.push_back({"random",
                    evaluate(pairs, baseline_random(pairs, config.random_rate, derive_seed(config.seed, "random")),
                             truth.negatives),
                    "rate=" + format_double(config.random_rate)});
  MethodResult best{"sPath", {}, ""};
  bool first = true;
  for (int length : config.spath_lengths) {
    auto m = evaluate(pairs, baseline_spath(pairs, data.positive, length, config.threads), truth.negatives);
    if (first || m.f1 > best.metrics.f1) {
      best.metrics = m;
      best.detail = "L=" + std::to_string(length);
      first = false;
    }
  }
  r.rows.push_back(best);
  r.rows.push_back({"negIn", evaluate(pairs, baseline_negin(pairs, refined.negative_interactions()), truth.negatives), ""});
  r.rows.push_back({"negInS", evaluate(pairs, membership(pairs, refined.negative_pairs()), truth.negatives), ""});
  const auto hyper = config.hyperparameters();
  auto plain_model = plain.train(hyper);
  r.rows.push_back({"NeLP-negIn", evaluate(pairs, labels_of(plain.predict(plain_model.model, pairs)), truth.negatives),
                    plain_model.solution.converged ? "" : "not converged"});
  auto model = refined.train(hyper);
  r.rows.push_back({"NeLP", evaluate(pairs, labels_of(refined.predict(model.model, pairs)), truth.negatives),
                    model.solution.converged ? "" : "not converged"});

  r.metadata = base_metadata(config, universe);
  r.metadata.push_back({"negin_pairs", std::to_string(ns.seed.size())});
  r.metadata.push_back({"negins_removed", std::to_string(ns.removed.size())});
  r.metadata.push_back({"negins_added", std::to_string(ns.added.size())});
  r.metadata.push_back({"labeled_rows", std::to_string(model.labeled)});
  r.metadata.push_back({"unlabeled_rows", std::to_string(model.unlabeled)});
  return r;
}

Report cross_site(const io::Dataset& train, const io::Dataset& test, const io::GroundTruth& test_truth,
                  const RunConfig& config) {
  auto options = PipelineOptions::from(config);
  Pipeline source(train, options, NegativeSource::NegInS);
  Pipeline target(test, options, NegativeSource::NegInS);
  auto universe = build_universe(test, test_truth, target.negative_samples().seed, target.negative_pairs(),
                                 config.missing_ratio, derive_seed(config.seed, "universe"));
  auto model = source.train(config.hyperparameters());
  Report r;
  r.kind = "cross-site";
  r.dataset = train.name + "->" + test.name;
  r.rows.push_back({"NeLP",
                    evaluate(universe.pairs, labels_of(target.predict(model.model, universe.pairs)),
                             test_truth.negatives),
                    train.name + "->" + test.name});
  r.metadata = base_metadata(config, universe);
  r.metadata.push_back({"train", train.name});
  r.metadata.push_back({"test", test.name});
  return r;
}

Report cb_sweep(const io::Dataset& data, const io::GroundTruth& truth, const RunConfig& config) {
  Pipeline refined(data, PipelineOptions::from(config), NegativeSource::NegInS);
  auto universe = build_universe(data, truth, refined.negative_samples().seed, refined.negative_pairs(),
                                 config.missing_ratio, derive_seed(config.seed, "universe"));
  Report r;
  r.kind = "cb-sweep";
  r.dataset = data.name;
  for (double v : config.cb_values) {
    auto hyper = config.hyperparameters();
    hyper.balance_weight = v;
    auto model = refined.train(hyper);
    r.rows.push_back({cb_label(v),
                      evaluate(universe.pairs, labels_of(refined.predict(model.model, universe.pairs)),
                               truth.negatives),
                      model.solution.converged ? "" : "not converged"});
  }
  r.metadata = base_metadata(config, universe);
  return r;
}

Report ablation(const io::Dataset& data, const io::GroundTruth& truth, const RunConfig& config) {
  Pipeline refined(data, PipelineOptions::from(config), NegativeSource::NegInS);
  auto universe = build_universe(data, truth, refined.negative_samples().seed, refined.negative_pairs(),
                                 config.missing_ratio, derive_seed(config.seed, "universe"));
  Report r;
  r.kind = "ablation";
  r.dataset = data.name;
  for (const auto& variant : solver::ablation_variants(config.hyperparameters())) {
    auto model = refined.train(variant.hyper);
    r.rows.push_back({variant.name,
                      evaluate(universe.pairs, labels_of(refined.predict(model.model, universe.pairs)),
                               truth.negatives),
                      model.solution.converged ? "" : "not converged"});
  }
  r.metadata = base_metadata(config, universe);
  return r;
}

std::string to_csv(const Report& report) {
  std::string out = "method,f1,precision,recall,tp,fp,fn,tn,detail\n";
  for (const auto& row : report.rows) {
    const auto& c = row.metrics.confusion;
    out += row.method + "," + format_double(row.metrics.f1) + "," + format_double(row.metrics.precision) + "," +
           format_double(row.metrics.recall) + "," + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," +
           std::to_string(c.fn) + "," + std::to_string(c.tn) + "," + row.detail + "\n";
  }
  return out;
}

std::string to_json(const Report& report) {
  Json j;
  j["kind"] = report.kind;
  j["dataset"] = report.dataset;
  Json meta = Json::object();
  for (const auto& [k, v] : report.metadata) meta[k] = v;
  j["metadata"] = meta;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    const auto& c = row.metrics.confusion;
    rows.push_back({{"method", row.method},
                    {"f1", row.metrics.f1},
                    {"precision", row.metrics.precision},
                    {"recall", row.metrics.recall},
                    {"tp", c.tp},
                    {"fp", c.fp},
                    {"fn", c.fn},
                    {"tn", c.tn},
                    {"detail", row.detail}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace nelp::eval
