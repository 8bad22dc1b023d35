#include "nelp/dataset.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "nelp/text.hpp"

namespace nelp::io {

bool natural_less(const std::string& a, const std::string& b) {
  auto numeric = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  const bool na = numeric(a), nb = numeric(b);
  if (na != nb) return na;
  if (na && a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

namespace {

struct Located {
  std::string a;
  std::string b;
  std::int64_t value = 0;
  std::size_t line = 0;
};

void expect_fields(std::span<const std::string_view> f, std::size_t n, const std::string& source, std::size_t line) {
  if (f.size() != n)
    throw InputError(source, line, "expected " + std::to_string(n) + " tab-separated fields, got " +
                                       std::to_string(f.size()));
  for (auto field : f)
    if (field.empty()) throw InputError(source, line, "empty field");
}

std::vector<Located> read_pairs(const Source& src) {
  std::vector<Located> out;
  for_each_record(src.text, src.name, [&](std::size_t line, std::span<const std::string_view> f) {
    expect_fields(f, 2, src.name, line);
    out.push_back({std::string(f[0]), std::string(f[1]), 0, line});
  });
  return out;
}

std::vector<std::string> read_users(const Source& src) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for_each_record(src.text, src.name, [&](std::size_t line, std::span<const std::string_view> f) {
    expect_fields(f, 1, src.name, line);
    std::string name(f[0]);
    if (!seen.insert(name).second) throw InputError(src.name, line, "duplicate user '" + name + "'");
    out.push_back(std::move(name));
  });
  return out;
}

std::vector<Located> read_opinions(const Source& src, const IngestOptions& options) {
  std::vector<Located> out;
  for_each_record(src.text, src.name, [&](std::size_t line, std::span<const std::string_view> f) {
    expect_fields(f, 3, src.name, line);
    auto raw = parse_int(f[2], src.name, line);
    std::int64_t v = raw;
    if (options.rating_threshold) {
      v = raw > *options.rating_threshold ? 1 : (raw < *options.rating_threshold ? -1 : 0);
    } else if (raw < -1 || raw > 1) {
      throw InputError(src.name, line, "opinion value must be -1, 0 or +1 (use a rating threshold for ratings)");
    }
    out.push_back({std::string(f[0]), std::string(f[1]), v, line});
  });
  return out;
}

struct Parsed {
  std::optional<std::vector<std::string>> users;
  std::vector<Located> positive;
  std::vector<Located> authorship;
  std::vector<Located> opinions;
  std::optional<std::vector<Located>> truth;
};

Parsed parse(const Bundle& bundle, const IngestOptions& options, bool with_truth) {
  Parsed p;
  if (bundle.users) p.users = read_users(*bundle.users);
  p.positive = read_pairs(bundle.positive);
  p.authorship = read_pairs(bundle.authorship);
  p.opinions = read_opinions(bundle.opinions, options);
  if (with_truth && bundle.truth) p.truth = read_pairs(*bundle.truth);
  return p;
}

std::vector<std::string> sorted_names(std::set<std::string> names) {
  std::vector<std::string> v(names.begin(), names.end());
  std::sort(v.begin(), v.end(), natural_less);
  return v;
}

UserId resolve(const IdMap& users, const std::string& name, const std::string& source, std::size_t line) {
  auto id = users.find(name);
  if (!id) throw InputError(source, line, "unknown user '" + name + "'");
  return *id;
}

// Builds a dataset over a fixed user universe from parsed records.
Dataset assemble(const Bundle& bundle, const Parsed& p, IdMap users) {
  Dataset d;
  d.name = bundle.name;
  d.users = std::move(users);

  std::vector<Pair> edges;
  edges.reserve(p.positive.size());
  for (const auto& r : p.positive)
    edges.push_back({resolve(d.users, r.a, bundle.positive.name, r.line),
                     resolve(d.users, r.b, bundle.positive.name, r.line)});
  d.positive = PositiveNetwork(d.users.size(), edges, &d.edge_stats);

  std::set<std::string> post_names;
  std::unordered_map<std::string, std::size_t> author_line;
  for (const auto& r : p.authorship) {
    auto [it, fresh] = author_line.emplace(r.b, r.line);
    if (!fresh)
      throw InputError(bundle.authorship.name, r.line,
                       "post '" + r.b + "' already has an author (line " + std::to_string(it->second) + ")");
    post_names.insert(r.b);
  }
  d.posts = IdMap::from_names(sorted_names(std::move(post_names)));
  std::vector<UserId> author(static_cast<std::size_t>(d.posts.size()));
  for (const auto& r : p.authorship)
    author[static_cast<std::size_t>(*d.posts.find(r.b))] = resolve(d.users, r.a, bundle.authorship.name, r.line);

  std::vector<InteractionData::Opinion> ops;
  std::unordered_map<Pair, std::size_t, PairHash> seen;
  for (const auto& r : p.opinions) {
    auto u = resolve(d.users, r.a, bundle.opinions.name, r.line);
    auto post = d.posts.find(r.b);
    if (!post) throw InputError(bundle.opinions.name, r.line, "post '" + r.b + "' has no author");
    auto [it, fresh] = seen.emplace(Pair{u, *post}, r.line);
    if (!fresh)
      throw InputError(bundle.opinions.name, r.line,
                       "repeated opinion on post '" + r.b + "' (line " + std::to_string(it->second) + ")");
    if (r.value == 0) {
      ++d.neutral_opinions;
      continue;
    }
    ops.push_back({u, *post, static_cast<std::int8_t>(r.value)});
  }
  d.interactions = InteractionData(d.users.size(), std::move(author), std::move(ops));
  return d;
}

GroundTruth build_truth(const Dataset& d, const std::vector<Located>& rows, const std::string& source) {
  GroundTruth t;
  std::set<Pair> unique;
  for (const auto& r : rows) {
    Pair pair{resolve(d.users, r.a, source, r.line), resolve(d.users, r.b, source, r.line)};
    if (pair.src == pair.dst) throw InputError(source, r.line, "negative self-link");
    if (d.positive.has_edge(pair.src, pair.dst)) {
      ++t.positive_overlap;
      continue;
    }
    unique.insert(pair);
  }
  t.negatives.assign(unique.begin(), unique.end());
  return t;
}

}  // namespace

Dataset load_dataset(const Bundle& bundle, const IngestOptions& options) {
  auto p = parse(bundle, options, false);
  IdMap users;
  if (p.users) {
    users = IdMap::from_names(*p.users);
  } else {
    std::set<std::string> names;
    for (const auto* rows : {&p.positive, &p.authorship})
      for (const auto& r : *rows) {
        names.insert(r.a);
        if (rows == &p.positive) names.insert(r.b);
      }
    for (const auto& r : p.opinions) names.insert(r.a);
    users = IdMap::from_names(sorted_names(std::move(names)));
  }
  return assemble(bundle, p, std::move(users));
}

GroundTruth load_truth(const Dataset& data, const Source& truth) {
  return build_truth(data, read_pairs(truth), truth.name);
}

Ingested ingest(const Bundle& bundle, const IngestOptions& options) {
  auto p = parse(bundle, options, true);
  std::set<std::string> names;
  if (p.users) names.insert(p.users->begin(), p.users->end());
  for (const auto& r : p.positive) {
    names.insert(r.a);
    names.insert(r.b);
  }
  for (const auto& r : p.authorship) names.insert(r.a);
  for (const auto& r : p.opinions) names.insert(r.a);
  if (p.truth)
    for (const auto& r : *p.truth) {
      names.insert(r.a);
      names.insert(r.b);
    }

  Ingested out;
  if (p.truth) {
    std::set<std::string> linked;
    for (const auto* rows : {&p.positive, &*p.truth})
      for (const auto& r : *rows)
        if (r.a != r.b) {
          linked.insert(r.a);
          linked.insert(r.b);
        }
    const auto before = names.size();
    std::erase_if(names, [&](const std::string& n) { return !linked.contains(n); });
    out.filtered_users = before - names.size();
    if (out.filtered_users > 0) {
      std::set<std::string> dropped_posts;
      std::erase_if(p.authorship, [&](const Located& r) {
        if (names.contains(r.a)) return false;
        dropped_posts.insert(r.b);
        return true;
      });
      std::erase_if(p.opinions,
                    [&](const Located& r) { return !names.contains(r.a) || dropped_posts.contains(r.b); });
    }
  }
  out.data = assemble(bundle, p, IdMap::from_names(sorted_names(std::move(names))));
  if (p.truth) out.truth = build_truth(out.data, *p.truth, bundle.truth->name);
  return out;
}

NormalizedFiles serialize(const Dataset& data, const GroundTruth* truth) {
  NormalizedFiles f;
  f.users = "#user\n";
  for (const auto& n : data.users.names()) f.users += n + "\n";
  f.positive = "#src\tdst\n";
  for (const auto& e : data.positive.edges())
    f.positive += data.users.name(e.src) + "\t" + data.users.name(e.dst) + "\n";
  f.authorship = "#user\tpost\n";
  for (PostId q = 0; q < data.interactions.num_posts(); ++q)
    f.authorship += data.users.name(data.interactions.author(q)) + "\t" + data.posts.name(q) + "\n";
  f.opinions = "#user\tpost\tvalue\n";
  for (const auto& o : data.interactions.opinions())
    f.opinions += data.users.name(o.user) + "\t" + data.posts.name(o.post) + "\t" + std::to_string(o.value) + "\n";
  if (truth) {
    std::string t = "#src\tdst\n";
    for (const auto& e : truth->negatives) t += data.users.name(e.src) + "\t" + data.users.name(e.dst) + "\n";
    f.truth = std::move(t);
  }
  return f;
}

}  // namespace nelp::io
