// Command-line front end: every stage of the pipeline as a subcommand, all
// driven by one key = value config and one master seed.

#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <numeric>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nelp/analysis.hpp"
#include "nelp/config.hpp"
#include "nelp/dataset.hpp"
#include "nelp/eval.hpp"
#include "nelp/planted.hpp"
#include "nelp/text.hpp"
#include "nelp/util.hpp"

namespace fs = std::filesystem;
using namespace nelp;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { Ok = 0, Internal = 1, Usage = 2, BadInput = 3, Io = 4 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::int64_t> rating_threshold;
  std::string out_dir = "out";
};

struct Context {
  RunConfig config;
  fs::path base;  // directory that relative data paths resolve against
  fs::path out;
};

Context load_context(const Globals& g) {
  Context c;
  if (!g.config_path.empty()) {
    if (!fs::exists(g.config_path)) throw IoError("cannot open config " + g.config_path);
    c.config = parse_config(read_file(g.config_path), g.config_path);
    c.base = fs::path(g.config_path).parent_path();
  }
  if (g.seed) c.config.seed = *g.seed;
  if (g.threads) c.config.threads = *g.threads;
  if (g.rating_threshold) c.config.rating_threshold = *g.rating_threshold;
  c.config.validate();
  c.out = g.out_dir;
  return c;
}

io::Source source(const Context& c, const std::string& path, const char* key) {
  if (path.empty()) throw InputError("config", 0, std::string("no '") + key + "' file configured");
  fs::path p = fs::path(path).is_absolute() ? fs::path(path) : c.base / path;
  if (!fs::exists(p)) throw IoError("cannot open " + p.string());
  return {p.string(), read_file(p.string())};
}

// Training inputs only; the truth file is deliberately left out.
io::Bundle training_bundle(const Context& c) {
  io::Bundle b;
  b.name = c.config.name;
  if (!c.config.users.empty()) b.users = source(c, c.config.users, "users");
  b.positive = source(c, c.config.positive, "positive");
  b.authorship = source(c, c.config.authorship, "authorship");
  b.opinions = source(c, c.config.opinions, "opinions");
  return b;
}

io::IngestOptions ingest_options(const Context& c) { return {c.config.rating_threshold}; }

io::Dataset load_training(const Context& c) { return io::load_dataset(training_bundle(c), ingest_options(c)); }

io::GroundTruth load_truth(const Context& c, const io::Dataset& data) {
  return io::load_truth(data, source(c, c.config.truth, "truth"));
}

void write(const Context& c, const std::string& rel, std::string_view text) {
  auto p = c.out / rel;
  fs::create_directories(p.parent_path());
  write_file(p.string(), text);
}

void write_report(const Context& c, const std::string& stem, const eval::Report& r) {
  const auto csv = eval::to_csv(r);
  write(c, "reports/" + stem + ".csv", csv);
  write(c, "reports/" + stem + ".json", eval::to_json(r));
  std::cout << csv;
}

std::vector<Pair> read_pairs(const std::string& path, const IdMap& users) {
  if (!fs::exists(path)) throw IoError("cannot open " + path);
  std::vector<Pair> pairs;
  for_each_record(read_file(path), path, [&](std::size_t line, std::span<const std::string_view> f) {
    if (f.size() < 2) throw InputError(path, line, "expected src<TAB>dst");
    auto a = users.find(std::string(f[0]));
    auto b = users.find(std::string(f[1]));
    if (!a || !b) throw InputError(path, line, "unknown user");
    pairs.push_back({*a, *b});
  });
  return pairs;
}

std::string pairs_tsv(std::span<const Pair> pairs, const IdMap& users) {
  std::string out = "#src\tdst\n";
  for (const auto& p : pairs) out += users.name(p.src) + "\t" + users.name(p.dst) + "\n";
  return out;
}

std::string predictions_tsv(std::span<const Pair> pairs, std::span<const solver::Prediction> pred,
                            const IdMap& users) {
  std::string out = "#src\tdst\tlabel\tdecision\n";
  for (std::size_t k = 0; k < pairs.size(); ++k)
    out += users.name(pairs[k].src) + "\t" + users.name(pairs[k].dst) + "\t" + std::to_string(pred[k].label) +
           "\t" + format_double(pred[k].decision) + "\n";
  return out;
}

std::string model_path(const Context& c, const std::string& given) {
  return given.empty() ? (c.out / "models/model.json").string() : given;
}

solver::Model read_model(const std::string& path) {
  if (!fs::exists(path)) throw IoError("cannot open model " + path);
  return solver::model_from_json(read_file(path));
}

// Subcommands ---------------------------------------------------------------

void cmd_generate(const Context& c) {
  auto planted = io::generate_planted(c.config.planted, c.config.seed);
  const auto& b = planted.bundle;
  write(c, "data/users.tsv", b.users->text);
  write(c, "data/positive.tsv", b.positive.text);
  write(c, "data/authorship.tsv", b.authorship.text);
  write(c, "data/opinions.tsv", b.opinions.text);
  write(c, "data/truth.tsv", b.truth->text);
  // A ready-to-use config next to the data, carrying every other setting.
  auto cfg = c.config;
  cfg.name = "planted";
  cfg.users = "users.tsv";
  cfg.positive = "positive.tsv";
  cfg.authorship = "authorship.tsv";
  cfg.opinions = "opinions.tsv";
  cfg.truth = "truth.tsv";
  cfg.rating_threshold.reset();
  write(c, "data/planted.cfg", to_string(cfg));
  Json j;
  j["users"] = c.config.planted.users;
  j["negatives"] = planted.negatives.size();
  j["seed"] = c.config.seed;
  j["config"] = (c.out / "data/planted.cfg").string();
  std::cout << j.dump(2) << "\n";
}

void cmd_ingest(const Context& c) {
  auto bundle = training_bundle(c);
  if (!c.config.truth.empty()) bundle.truth = source(c, c.config.truth, "truth");
  auto ing = io::ingest(bundle, ingest_options(c));
  auto files = io::serialize(ing.data, ing.truth ? &*ing.truth : nullptr);
  write(c, "data/users.tsv", files.users);
  write(c, "data/positive.tsv", files.positive);
  write(c, "data/authorship.tsv", files.authorship);
  write(c, "data/opinions.tsv", files.opinions);
  if (files.truth) write(c, "data/truth.tsv", *files.truth);
  Json j;
  j["dataset"] = ing.data.name;
  j["users"] = ing.data.users.size();
  j["posts"] = ing.data.posts.size();
  j["positive_edges"] = ing.data.positive.num_edges();
  j["opinions"] = ing.data.interactions.opinions().size();
  j["neutral_opinions"] = ing.data.neutral_opinions;
  j["filtered_users"] = ing.filtered_users;
  if (ing.truth) {
    j["negative_links"] = ing.truth->negatives.size();
    j["truth_positive_overlap"] = ing.truth->positive_overlap;
  }
  write(c, "reports/ingest.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
}

void cmd_analyze(const Context& c) {
  auto data = load_training(c);
  auto truth = load_truth(c, data);
  auto paths = analysis::enemy_path_distribution(data.positive, truth.negatives, c.config.path_cap);
  std::vector<WeightedEdge> neg;
  for (const auto& p : truth.negatives) neg.push_back({p.src, p.dst, 1.0});
  auto triads = analysis::triad_census(SignedNetwork(data.positive, neg));
  analysis::CorrelationOptions opt;
  opt.seed = derive_seed(c.config.seed, "analysis");
  opt.k_max = c.config.k_max;
  opt.min_pairs_per_k = c.config.min_pairs_per_k;
  auto corr =
      analysis::interaction_link_correlation(compute_negative_interactions(data.interactions), truth.negatives, opt);
  write(c, "reports/path_lengths.csv", analysis::to_csv(paths));
  write(c, "reports/path_lengths.json", analysis::to_json(paths));
  write(c, "reports/triads.json", analysis::to_json(triads));
  write(c, "reports/correlation.csv", analysis::to_csv(corr));
  write(c, "reports/correlation.json", analysis::to_json(corr));
  std::cout << analysis::to_csv(paths);
}

eval::Pipeline make_pipeline(const Context& c, const io::Dataset& data) {
  return eval::Pipeline(data, eval::PipelineOptions::from(c.config), eval::NegativeSource::NegInS);
}

void cmd_sample(const Context& c) {
  auto data = load_training(c);
  auto p = make_pipeline(c, data);
  const auto& ns = p.negative_samples();
  write(c, "samples/samples.tsv", sampling::to_tsv({ns.negatives, p.positive_samples()}, data.users));
  Json j;
  j["seed_pairs"] = ns.seed.size();
  j["removed"] = ns.removed.size();
  j["added"] = ns.added.size();
  j["negatives"] = ns.negatives.size();
  j["positives"] = p.positive_samples().size();
  write(c, "reports/samples.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
}

void cmd_features(const Context& c, const std::string& pairs_file) {
  auto data = load_training(c);
  auto p = make_pipeline(c, data);
  features::FeatureMatrix m;
  if (!pairs_file.empty()) {
    m = p.features(read_pairs(pairs_file, data.users));
  } else {
    // The labeled samples: NS rows then PS rows.
    const auto& all = p.sample_features();
    const auto rows = static_cast<Eigen::Index>(p.negative_samples().negatives.size() + p.positive_samples().size());
    m.pairs.assign(all.pairs.begin(), all.pairs.begin() + rows);
    m.values = all.values.topRows(rows);
  }
  write(c, "features/features.tsv", features::to_tsv(m, data.users));
  std::cout << m.pairs.size() << " rows\n";
}

void cmd_train(const Context& c) {
  auto data = load_training(c);
  auto p = make_pipeline(c, data);
  auto t = p.train(c.config.hyperparameters());
  write(c, "models/model.json", solver::to_json(t.model));
  Json j;
  j["labeled"] = t.labeled;
  j["unlabeled"] = t.unlabeled;
  j["couplings"] = t.couplings;
  j["iterations"] = t.solution.iterations;
  j["converged"] = t.solution.converged;
  j["gap"] = t.solution.gap;
  j["kkt_residual"] = t.solution.kkt_residual;
  j["objective"] = t.solution.objective;
  j["bias"] = t.solution.bias;
  j["free_support_vectors"] = t.solution.free_support_vectors;
  j["config_hash"] = config_hash(c.config);
  write(c, "reports/train.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
}

void cmd_predict(const Context& c, const std::string& model_file, const std::string& pairs_file) {
  auto data = load_training(c);
  auto model = read_model(model_path(c, model_file));
  auto pairs = read_pairs(pairs_file, data.users);
  auto p = make_pipeline(c, data);
  auto pred = p.predict(model, pairs);
  const auto tsv = predictions_tsv(pairs, pred, data.users);
  write(c, "reports/predictions.tsv", tsv);
  std::cout << tsv;
}

void cmd_evaluate(const Context& c, const std::string& model_file, const std::string& predictions_file) {
  auto data = load_training(c);
  auto truth = load_truth(c, data);
  eval::Report r;
  r.kind = "evaluate";
  r.dataset = data.name;
  if (!predictions_file.empty()) {
    if (!fs::exists(predictions_file)) throw IoError("cannot open " + predictions_file);
    std::vector<Pair> pairs;
    std::vector<int> labels;
    for_each_record(read_file(predictions_file), predictions_file,
                    [&](std::size_t line, std::span<const std::string_view> f) {
                      if (f.size() < 3) throw InputError(predictions_file, line, "expected src, dst, label");
                      auto a = data.users.find(std::string(f[0]));
                      auto b = data.users.find(std::string(f[1]));
                      if (!a || !b) throw InputError(predictions_file, line, "unknown user");
                      auto label = parse_int(f[2], predictions_file, line);
                      if (label != 1 && label != -1) throw InputError(predictions_file, line, "label must be 1 or -1");
                      pairs.push_back({*a, *b});
                      labels.push_back(static_cast<int>(label));
                    });
    // Truth pairs the file does not mention count as predicted non-negative.
    std::set<Pair> listed(pairs.begin(), pairs.end());
    for (const auto& t : truth.negatives)
      if (!listed.contains(t)) {
        pairs.push_back(t);
        labels.push_back(1);
      }
    // evaluate() wants the pairs sorted.
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return pairs[x] < pairs[y]; });
    std::vector<Pair> sp;
    std::vector<int> sl;
    for (auto k : order) {
      sp.push_back(pairs[k]);
      sl.push_back(labels[k]);
    }
    r.rows.push_back(eval::MethodResult{"predictions", eval::evaluate(sp, sl, truth.negatives), predictions_file});
  } else {
    auto model = read_model(model_path(c, model_file));
    auto p = make_pipeline(c, data);
    auto universe = eval::build_universe(data, truth, p.negative_samples().seed, p.negative_pairs(),
                                         c.config.missing_ratio, derive_seed(c.config.seed, "universe"));
    std::vector<int> labels;
    for (const auto& pr : p.predict(model, universe.pairs)) labels.push_back(pr.label);
    r.rows.push_back(eval::MethodResult{"model", eval::evaluate(universe.pairs, labels, truth.negatives), ""});
    r.metadata.emplace_back("universe_size", std::to_string(universe.pairs.size()));
    r.metadata.emplace_back("universe_definition", universe.definition);
  }
  r.metadata.emplace_back("config_hash", config_hash(c.config));
  write_report(c, "evaluate", r);
}

void cmd_compare(const Context& c) {
  auto data = load_training(c);
  auto truth = load_truth(c, data);
  write_report(c, "compare", eval::run_comparison(data, truth, c.config));
  // The same universe the comparison scored, for external tools.
  auto p = make_pipeline(c, data);
  auto universe = eval::build_universe(data, truth, p.negative_samples().seed, p.negative_pairs(),
                                       c.config.missing_ratio, derive_seed(c.config.seed, "universe"));
  write(c, "reports/universe.tsv", pairs_tsv(universe.pairs, data.users));
}

void cmd_cross_site(const Context& c, const std::string& test_config) {
  auto train = load_training(c);
  if (!fs::exists(test_config)) throw IoError("cannot open config " + test_config);
  Context t = c;
  t.config = parse_config(read_file(test_config), test_config);
  t.base = fs::path(test_config).parent_path();
  auto test = load_training(t);
  auto truth = load_truth(t, test);
  write_report(c, "cross_site", eval::cross_site(train, test, truth, c.config));
}

void cmd_sweep(const Context& c) {
  auto data = load_training(c);
  auto truth = load_truth(c, data);
  write_report(c, "sweep_cb", eval::cb_sweep(data, truth, c.config));
}

void cmd_ablate(const Context& c) {
  auto data = load_training(c);
  auto truth = load_truth(c, data);
  write_report(c, "ablation", eval::ablation(data, truth, c.config));
}

int fail(Exit code, const std::string& kind, const std::string& message, const InputError* input = nullptr) {
  Json j;
  j["error"]["kind"] = kind;
  j["error"]["message"] = message;
  if (input) {
    j["error"]["source"] = input->source();
    j["error"]["line"] = input->line();
  }
  j["error"]["exit_code"] = static_cast<int>(code);
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nelp: negative link prediction from positive links and negative interactions"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value run configuration");
  app.add_option("--seed", g.seed, "master seed (overrides the config)");
  app.add_option("--threads", g.threads, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  app.add_option("--rating-threshold", g.rating_threshold, "treat opinion values as raw ratings around this value");
  app.add_option("--out-dir", g.out_dir, "output root for reports/, models/, samples/, features/, data/");

  std::string model_file, pairs_file, predictions_file, test_config;
  auto* generate = app.add_subcommand("generate", "write a planted synthetic bundle to <out>/data");
  auto* ingest = app.add_subcommand("ingest", "normalize the configured files into <out>/data");
  auto* analyze = app.add_subcommand("analyze", "enemy distances, triad census, interaction/link correlation");
  auto* sample = app.add_subcommand("sample", "negative and positive training samples");
  auto* feats = app.add_subcommand("features", "feature rows for the samples or for --pairs");
  feats->add_option("--pairs", pairs_file, "src<TAB>dst file");
  auto* train = app.add_subcommand("train", "fit NeLP and write <out>/models/model.json");
  auto* predict = app.add_subcommand("predict", "label pairs with a trained model");
  predict->add_option("--model", model_file, "model JSON (default <out>/models/model.json)");
  predict->add_option("--pairs", pairs_file, "src<TAB>dst file")->required();
  auto* evaluate = app.add_subcommand("evaluate", "score a model or a predictions file against the truth");
  evaluate->add_option("--model", model_file, "model JSON (default <out>/models/model.json)");
  evaluate->add_option("--predictions", predictions_file, "src<TAB>dst<TAB>label file");
  auto* compare = app.add_subcommand("compare", "all methods on one evaluation universe");
  auto* cross = app.add_subcommand("cross-site", "train on --config, test on --test-config");
  cross->add_option("--test-config", test_config, "config of the test dataset")->required();
  auto* sweep = app.add_subcommand("sweep-cb", "F1 across the configured C_b values");
  auto* ablate = app.add_subcommand("ablate", "full model against its ablated variants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    return fail(Usage, "usage", e.what());
  }

  try {
    const auto c = load_context(g);
    if (generate->parsed()) cmd_generate(c);
    if (ingest->parsed()) cmd_ingest(c);
    if (analyze->parsed()) cmd_analyze(c);
    if (sample->parsed()) cmd_sample(c);
    if (feats->parsed()) cmd_features(c, pairs_file);
    if (train->parsed()) cmd_train(c);
    if (predict->parsed()) cmd_predict(c, model_file, pairs_file);
    if (evaluate->parsed()) cmd_evaluate(c, model_file, predictions_file);
    if (compare->parsed()) cmd_compare(c);
    if (cross->parsed()) cmd_cross_site(c, test_config);
    if (sweep->parsed()) cmd_sweep(c);
    if (ablate->parsed()) cmd_ablate(c);
  } catch (const InputError& e) {
    return fail(BadInput, "input", e.what(), &e);
  } catch (const IoError& e) {
    return fail(Io, "io", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BadInput, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    return fail(Internal, "internal", e.what());
  }
  return Ok;
}
