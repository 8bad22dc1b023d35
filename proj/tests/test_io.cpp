#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "nelp/analysis.hpp"
#include "nelp/config.hpp"
#include "nelp/dataset.hpp"
#include "nelp/planted.hpp"
#include "nelp/text.hpp"

using namespace nelp;

namespace {

io::Bundle tiny_bundle() {
  io::Bundle b;
  b.name = "tiny";
  b.positive = {"positive.tsv", "#src\tdst\nalice\tbob\nbob\tcarol\nalice\tbob\n"};
  b.authorship = {"authorship.tsv", "#user\tpost\ncarol\tp1\nbob\tp2\n"};
  b.opinions = {"opinions.tsv", "#user\tpost\tvalue\nalice\tp1\t-1\nalice\tp2\t1\ncarol\tp2\t0\n"};
  b.truth = io::Source{"truth.tsv", "#src\tdst\nalice\tcarol\n"};
  return b;
}

}  // namespace

TEST_CASE("ingesting a small bundle") {
  auto ing = io::ingest(tiny_bundle());
  const auto& d = ing.data;
  CHECK(d.users.size() == 3);
  CHECK(d.positive.num_edges() == 2);
  CHECK(d.edge_stats.duplicates == 1);
  CHECK(d.neutral_opinions == 1);
  REQUIRE(ing.truth);
  const auto alice = *d.users.find("alice"), carol = *d.users.find("carol");
  CHECK(ing.truth->negatives == std::vector<Pair>{{alice, carol}});
  auto n = compute_negative_interactions(d.interactions);
  CHECK(n.at(alice, carol) == 1);
  CHECK(n.nonzeros() == 1);
}

TEST_CASE("the training loader ignores the truth file") {
  auto b = tiny_bundle();
  b.truth->text = "this is not a tsv\tfile\tat all\n";
  CHECK_NOTHROW(io::load_dataset(b));
  CHECK_THROWS_AS(io::ingest(b), InputError);
}

TEST_CASE("malformed lines report their position") {
  auto b = tiny_bundle();
  b.positive.text = "#src\tdst\nalice\tbob\nalice\n";
  try {
    io::load_dataset(b);
    FAIL("expected an input error");
  } catch (const InputError& e) {
    CHECK(e.source() == "positive.tsv");
    CHECK(e.line() == 3);
  }
  b = tiny_bundle();
  b.opinions.text = "alice\tp1\t5\n";
  CHECK_THROWS_AS(io::load_dataset(b), InputError);
}

TEST_CASE("rating threshold") {
  auto b = tiny_bundle();
  b.opinions.text = "alice\tp1\t5\ncarol\tp2\t3\nalice\tp2\t1\n";
  io::IngestOptions opt;
  opt.rating_threshold = 3;
  auto d = io::load_dataset(b, opt);
  std::vector<int> values;
  for (const auto& o : d.interactions.opinions()) values.push_back(o.value);
  std::multiset<int> got(values.begin(), values.end());
  // A rating equal to the threshold carries no signal and is dropped.
  CHECK(got == std::multiset<int>{-1, 1});
  CHECK(d.neutral_opinions == 1);
  const auto alice = *d.users.find("alice");
  // 5 > 3 is a like and 1 < 3 a dislike.
  for (const auto& o : d.interactions.opinions())
    if (o.user == alice) CHECK(o.value == (*d.posts.find("p1") == o.post ? 1 : -1));
}

TEST_CASE("serialization round trips byte for byte") {
  io::PlantedParams p;
  p.users = 200;
  auto planted = io::generate_planted(p, 5);
  auto ing = io::ingest(planted.bundle);
  auto files = io::serialize(ing.data, &*ing.truth);
  io::Bundle again;
  again.users = io::Source{"users", files.users};
  again.positive = {"positive", files.positive};
  again.authorship = {"authorship", files.authorship};
  again.opinions = {"opinions", files.opinions};
  again.truth = io::Source{"truth", *files.truth};
  auto ing2 = io::ingest(again);
  auto files2 = io::serialize(ing2.data, &*ing2.truth);
  CHECK(files2.users == files.users);
  CHECK(files2.positive == files.positive);
  CHECK(files2.authorship == files.authorship);
  CHECK(files2.opinions == files.opinions);
  CHECK(*files2.truth == *files.truth);
}

TEST_CASE("natural ordering of names") {
  CHECK(io::natural_less("2", "10"));
  CHECK_FALSE(io::natural_less("10", "2"));
  CHECK(io::natural_less("99", "abc"));
  CHECK(io::natural_less("abc", "abd"));
}

TEST_CASE("config round trip and validation") {
  auto cfg = parse_config("c_b = 0.05\nseed = 17\n# comment\nweight_mode = uniform\nplanted.users = 300\n");
  CHECK(cfg.c_b == 0.05);
  CHECK(cfg.seed == 17);
  CHECK(cfg.weight_mode == sampling::WeightMode::Uniform);
  CHECK(cfg.planted.users == 300);
  auto text = to_string(cfg);
  CHECK(to_string(parse_config(text)) == text);
  CHECK(config_hash(cfg) == config_hash(parse_config(text)));
  CHECK(config_hash(cfg) != config_hash(RunConfig{}));
  CHECK_THROWS_AS(parse_config("c_bb = 1\n"), InputError);
  CHECK_THROWS_AS(parse_config("c_b 1\n"), InputError);
  CHECK_THROWS(parse_config("c_n = -1\n"));
}

TEST_CASE("flip probability") {
  CHECK(io::flip_probability(1.0) == 0.0);
  CHECK(io::flip_probability(0.95, 0.9) == 0.0);
  const double e = io::flip_probability(0.92);
  const double odd = 3 * e * (1 - e) * (1 - e) + e * e * e;
  CHECK(1.0 - odd == doctest::Approx(0.92));
  const double e2 = io::flip_probability(0.8, 0.95);
  const double odd2 = 3 * e2 * (1 - e2) * (1 - e2) + e2 * e2 * e2;
  CHECK(0.95 - odd2 * (2 * 0.95 - 1) == doctest::Approx(0.8));
}

TEST_CASE("planted generator") {
  io::PlantedParams p;
  p.users = 800;
  auto a = io::generate_planted(p, 11);
  auto b = io::generate_planted(p, 11);
  CHECK(a.bundle.positive.text == b.bundle.positive.text);
  CHECK(a.bundle.opinions.text == b.bundle.opinions.text);
  CHECK(a.negatives == b.negatives);
  CHECK(io::generate_planted(p, 12).bundle.positive.text != a.bundle.positive.text);

  auto ing = io::ingest(a.bundle);
  const auto& truth = ing.truth->negatives;
  CHECK(truth.size() == a.negatives.size());
  auto census = analysis::triad_census(SignedNetwork(ing.data.positive, [&] {
    std::vector<WeightedEdge> e;
    for (const auto& t : truth) e.push_back({t.src, t.dst, 1.0});
    return e;
  }()));
  REQUIRE(census.balanced_ratio);
  CHECK(*census.balanced_ratio == doctest::Approx(p.balanced_fraction).epsilon(0.03 / p.balanced_fraction));

  auto bad = p;
  bad.users = 2;
  CHECK_THROWS(io::generate_planted(bad, 1));
  bad = p;
  bad.bridge_density = 1.5;
  CHECK_THROWS(io::generate_planted(bad, 1));
}

TEST_CASE("without mild dislikes or noise every planted enemy interacts") {
  io::PlantedParams p;
  p.users = 400;
  p.dislike_probability = 1.0;
  p.mild_dislike_probability = 1.0;
  p.background_dislikes = 0.0;
  p.friend_dislike_probability = 0.0;
  auto planted = io::generate_planted(p, 3);
  auto ing = io::ingest(planted.bundle);
  auto n = compute_negative_interactions(ing.data.interactions);
  std::size_t hit = 0;
  for (const auto& t : ing.truth->negatives) hit += n.at(t.src, t.dst) > 0;
  CHECK(hit == ing.truth->negatives.size());
  // And nothing else does.
  CHECK(n.nonzeros() == ing.truth->negatives.size());
}
