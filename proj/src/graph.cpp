#include "nelp/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>
#include <tuple>

namespace nelp {

std::int32_t IdMap::intern(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  auto id = static_cast<std::int32_t>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

std::optional<std::int32_t> IdMap::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

IdMap IdMap::from_names(std::vector<std::string> names) {
  IdMap map;
  for (auto& n : names) {
    if (map.find(n)) throw std::invalid_argument("duplicate identifier: " + n);
    map.intern(n);
  }
  return map;
}

bool Adjacency::contains(UserId u, UserId v) const {
  auto r = row(u);
  return std::binary_search(r.begin(), r.end(), v);
}

namespace {

// Builds CSR from (row, col) pairs; pairs must already be unique.
Adjacency build_csr(std::int32_t n, std::vector<Pair> pairs) {
  std::sort(pairs.begin(), pairs.end());
  Adjacency adj;
  adj.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  adj.targets.reserve(pairs.size());
  for (const auto& p : pairs) {
    ++adj.offsets[static_cast<std::size_t>(p.src) + 1];
    adj.targets.push_back(p.dst);
  }
  for (std::size_t i = 1; i < adj.offsets.size(); ++i) adj.offsets[i] += adj.offsets[i - 1];
  return adj;
}

std::vector<Pair> undirected_pairs(std::span<const Pair> directed) {
  std::vector<Pair> und;
  und.reserve(directed.size() * 2);
  for (const auto& e : directed) {
    und.push_back(e);
    und.push_back({e.dst, e.src});
  }
  std::sort(und.begin(), und.end());
  und.erase(std::unique(und.begin(), und.end()), und.end());
  return und;
}

void check_range(std::int32_t n, UserId u) {
  if (u < 0 || u >= n) throw std::out_of_range("user id " + std::to_string(u) + " outside [0, " + std::to_string(n) + ")");
}

}  // namespace

PositiveNetwork::PositiveNetwork(std::int32_t num_users, std::span<const Pair> edges, BuildStats* stats)
    : num_users_(num_users) {
  if (num_users < 0) throw std::invalid_argument("negative user count");
  BuildStats local;
  std::vector<Pair> clean;
  clean.reserve(edges.size());
  for (const auto& e : edges) {
    check_range(num_users, e.src);
    check_range(num_users, e.dst);
    if (e.src == e.dst) {
      ++local.self_loops;
      continue;
    }
    clean.push_back(e);
  }
  std::sort(clean.begin(), clean.end());
  auto last = std::unique(clean.begin(), clean.end());
  local.duplicates = static_cast<std::size_t>(clean.end() - last);
  clean.erase(last, clean.end());

  std::vector<Pair> reversed;
  reversed.reserve(clean.size());
  for (const auto& e : clean) reversed.push_back({e.dst, e.src});
  und_ = build_csr(num_users, undirected_pairs(clean));
  in_ = build_csr(num_users, std::move(reversed));
  out_ = build_csr(num_users, std::move(clean));
  if (stats) *stats = local;
}

std::vector<Pair> PositiveNetwork::edges() const {
  std::vector<Pair> result;
  result.reserve(num_edges());
  for (UserId u = 0; u < num_users_; ++u)
    for (auto v : out(u)) result.push_back({u, v});
  return result;
}

void PositiveNetwork::check_user(UserId u) const { check_range(num_users_, u); }

SignedNetwork::SignedNetwork(PositiveNetwork positive, std::span<const WeightedEdge> negatives)
    : positive_(std::move(positive)) {
  const auto n = positive_.num_users();
  std::vector<WeightedEdge> neg(negatives.begin(), negatives.end());
  for (const auto& e : neg) {
    check_range(n, e.src);
    check_range(n, e.dst);
    if (e.src == e.dst) throw std::invalid_argument("negative self-loop");
    if (!(e.weight >= 0.0 && e.weight <= 1.0)) throw std::invalid_argument("negative edge weight outside [0,1]");
    if (positive_.has_edge(e.src, e.dst))
      throw std::invalid_argument("negative edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                                  " duplicates a positive edge");
  }
  auto by_pair = [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  };
  std::sort(neg.begin(), neg.end(), by_pair);
  for (std::size_t i = 1; i < neg.size(); ++i)
    if (neg[i].src == neg[i - 1].src && neg[i].dst == neg[i - 1].dst)
      throw std::invalid_argument("duplicate negative edge");

  std::vector<Pair> out_pairs, in_pairs;
  out_pairs.reserve(neg.size());
  in_pairs.reserve(neg.size());
  for (const auto& e : neg) {
    out_pairs.push_back({e.src, e.dst});
    in_pairs.push_back({e.dst, e.src});
  }
  neg_out_ = build_csr(n, out_pairs);
  neg_in_ = build_csr(n, in_pairs);

  neg_out_w_.resize(neg.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg_out_w_[i] = neg[i].weight;
  auto by_reverse = neg;
  std::sort(by_reverse.begin(), by_reverse.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.dst, a.src) < std::tie(b.dst, b.src);
  });
  neg_in_w_.resize(neg.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg_in_w_[i] = by_reverse[i].weight;

  auto all = positive_.edges();
  all.insert(all.end(), out_pairs.begin(), out_pairs.end());
  und_ = build_csr(n, undirected_pairs(all));
}

std::span<const double> SignedNetwork::negative_out_weights(UserId u) const {
  auto b = neg_out_.offsets[static_cast<std::size_t>(u)];
  auto e = neg_out_.offsets[static_cast<std::size_t>(u) + 1];
  return {neg_out_w_.data() + b, e - b};
}

std::span<const double> SignedNetwork::negative_in_weights(UserId u) const {
  auto b = neg_in_.offsets[static_cast<std::size_t>(u)];
  auto e = neg_in_.offsets[static_cast<std::size_t>(u) + 1];
  return {neg_in_w_.data() + b, e - b};
}

double SignedNetwork::negative_weight(UserId src, UserId dst) const {
  auto r = negative_out(src);
  auto it = std::lower_bound(r.begin(), r.end(), dst);
  if (it == r.end() || *it != dst) return 0.0;
  return negative_out_weights(src)[static_cast<std::size_t>(it - r.begin())];
}

std::optional<Sign> SignedNetwork::edge_sign(UserId src, UserId dst) const {
  if (positive_.has_edge(src, dst)) return Sign::Positive;
  if (has_negative(src, dst)) return Sign::Negative;
  return std::nullopt;
}

InteractionData::InteractionData(std::int32_t num_users, std::vector<UserId> post_author,
                                 std::vector<Opinion> opinions)
    : num_users_(num_users), author_(std::move(post_author)) {
  const auto num_posts = static_cast<std::int32_t>(author_.size());
  for (auto a : author_) check_range(num_users, a);

  std::erase_if(opinions, [](const Opinion& o) { return o.value == 0; });
  for (const auto& o : opinions) {
    check_range(num_users, o.user);
    if (o.post < 0 || o.post >= num_posts) throw std::out_of_range("post id " + std::to_string(o.post) + " out of range");
    if (o.value < -1 || o.value > 1) throw std::invalid_argument("opinion value outside {-1,0,+1}");
  }

  std::vector<Pair> authored;
  authored.reserve(author_.size());
  for (PostId p = 0; p < num_posts; ++p) authored.push_back({author_[static_cast<std::size_t>(p)], p});
  auto csr = build_csr(num_users, std::move(authored));
  posts_offsets_ = std::move(csr.offsets);
  posts_ = std::move(csr.targets);

  by_user_ = opinions;
  std::sort(by_user_.begin(), by_user_.end(),
            [](const Opinion& a, const Opinion& b) { return std::tie(a.user, a.post) < std::tie(b.user, b.post); });
  for (std::size_t i = 1; i < by_user_.size(); ++i)
    if (by_user_[i].user == by_user_[i - 1].user && by_user_[i].post == by_user_[i - 1].post)
      throw std::invalid_argument("duplicate opinion of user " + std::to_string(by_user_[i].user) + " on post " +
                                  std::to_string(by_user_[i].post));
  user_offsets_.assign(static_cast<std::size_t>(num_users) + 1, 0);
  for (const auto& o : by_user_) ++user_offsets_[static_cast<std::size_t>(o.user) + 1];
  for (std::size_t i = 1; i < user_offsets_.size(); ++i) user_offsets_[i] += user_offsets_[i - 1];

  by_post_ = std::move(opinions);
  std::sort(by_post_.begin(), by_post_.end(),
            [](const Opinion& a, const Opinion& b) { return std::tie(a.post, a.user) < std::tie(b.post, b.user); });
  post_offsets_.assign(static_cast<std::size_t>(num_posts) + 1, 0);
  for (const auto& o : by_post_) ++post_offsets_[static_cast<std::size_t>(o.post) + 1];
  for (std::size_t i = 1; i < post_offsets_.size(); ++i) post_offsets_[i] += post_offsets_[i - 1];
}

std::span<const PostId> InteractionData::posts_by(UserId u) const {
  auto b = posts_offsets_[static_cast<std::size_t>(u)];
  auto e = posts_offsets_[static_cast<std::size_t>(u) + 1];
  return {posts_.data() + b, e - b};
}

std::span<const InteractionData::Opinion> InteractionData::opinions_by(UserId u) const {
  auto b = user_offsets_[static_cast<std::size_t>(u)];
  auto e = user_offsets_[static_cast<std::size_t>(u) + 1];
  return {by_user_.data() + b, e - b};
}

std::span<const InteractionData::Opinion> InteractionData::opinions_on(PostId p) const {
  auto b = post_offsets_[static_cast<std::size_t>(p)];
  auto e = post_offsets_[static_cast<std::size_t>(p) + 1];
  return {by_post_.data() + b, e - b};
}

InteractionMatrix::InteractionMatrix(std::int32_t num_users, std::vector<Entry> entries) : num_users_(num_users) {
  for (const auto& e : entries) {
    check_range(num_users, e.row);
    check_range(num_users, e.col);
    if (e.count < 0) throw std::invalid_argument("negative interaction count");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
  offsets_.assign(static_cast<std::size_t>(num_users) + 1, 0);
  for (std::size_t i = 0; i < entries.size();) {
    auto j = i;
    std::int32_t total = 0;
    while (j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col)
      total += entries[j++].count;
    if (total > 0) {
      cols_.push_back(entries[i].col);
      counts_.push_back(total);
      ++offsets_[static_cast<std::size_t>(entries[i].row) + 1];
    }
    i = j;
  }
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
}

std::int32_t InteractionMatrix::at(UserId i, UserId j) const {
  auto cols = row_cols(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0;
  return row_counts(i)[static_cast<std::size_t>(it - cols.begin())];
}

std::span<const UserId> InteractionMatrix::row_cols(UserId i) const {
  auto b = offsets_[static_cast<std::size_t>(i)];
  auto e = offsets_[static_cast<std::size_t>(i) + 1];
  return {cols_.data() + b, e - b};
}

std::span<const std::int32_t> InteractionMatrix::row_counts(UserId i) const {
  auto b = offsets_[static_cast<std::size_t>(i)];
  auto e = offsets_[static_cast<std::size_t>(i) + 1];
  return {counts_.data() + b, e - b};
}

std::vector<InteractionMatrix::Entry> InteractionMatrix::entries() const {
  std::vector<Entry> result;
  result.reserve(nonzeros());
  for (UserId i = 0; i < num_users_; ++i) {
    auto cols = row_cols(i);
    auto counts = row_counts(i);
    for (std::size_t k = 0; k < cols.size(); ++k) result.push_back({i, cols[k], counts[k]});
  }
  return result;
}

InteractionMatrix InteractionMatrix::transposed() const {
  auto e = entries();
  for (auto& x : e) std::swap(x.row, x.col);
  return InteractionMatrix(num_users_, std::move(e));
}

InteractionMatrix compute_interactions(const InteractionData& data, Polarity polarity, Orientation orientation) {
  const std::int8_t wanted = polarity == Polarity::Negative ? -1 : 1;
  std::vector<InteractionMatrix::Entry> entries;
  for (const auto& o : data.opinions()) {
    if (o.value != wanted) continue;
    auto author = data.author(o.post);
    if (orientation == Orientation::HolderToAuthor)
      entries.push_back({o.user, author, 1});
    else
      entries.push_back({author, o.user, 1});
  }
  return InteractionMatrix(data.num_users(), std::move(entries));
}

namespace {

template <typename Visit>
void bfs(const PositiveNetwork& g, UserId src, Direction direction, std::vector<int>& dist, Visit&& on_settle) {
  std::deque<UserId> queue;
  dist[static_cast<std::size_t>(src)] = 0;
  queue.push_back(src);
  while (!queue.empty()) {
    auto u = queue.front();
    queue.pop_front();
    auto du = dist[static_cast<std::size_t>(u)];
    if (!on_settle(u, du)) return;
    auto next = direction == Direction::Directed ? g.out(u) : g.neighbors(u);
    for (auto v : next) {
      auto& dv = dist[static_cast<std::size_t>(v)];
      if (dv < 0) {
        dv = du + 1;
        queue.push_back(v);
      }
    }
  }
}

}  // namespace

PathLength shortest_path_length(const PositiveNetwork& g, UserId src, UserId dst, int cap, Direction direction) {
  g.check_user(src);
  g.check_user(dst);
  if (src == dst) throw std::invalid_argument("shortest_path_length: src == dst");
  if (cap < 1) throw std::invalid_argument("shortest_path_length: cap < 1");
  std::vector<int> dist(static_cast<std::size_t>(g.num_users()), -1);
  int found = -1;
  bfs(g, src, direction, dist, [&](UserId u, int d) {
    if (u == dst) {
      found = d;
      return false;
    }
    return true;
  });
  if (found < 0) return {PathLength::Kind::Unreachable, 0};
  if (found > cap) return {PathLength::Kind::BeyondCap, found};
  return {PathLength::Kind::Finite, found};
}

std::vector<int> bfs_distances(const PositiveNetwork& g, UserId src, int cap, Direction direction) {
  g.check_user(src);
  std::vector<int> dist(static_cast<std::size_t>(g.num_users()), -1);
  bfs(g, src, direction, dist, [&](UserId, int d) { return d < cap; });
  // Nodes discovered at cap+1 by the last settled layer are beyond the cap.
  for (auto& d : dist)
    if (d > cap) d = -1;
  return dist;
}

namespace {

TriadLink link_between(const SignedNetwork& g, UserId a, UserId b) {
  TriadLink link;
  link.forward = g.edge_sign(a, b);
  link.backward = g.edge_sign(b, a);
  if (link.forward && link.backward) {
    if (*link.forward == *link.backward) link.undirected = link.forward;
  } else if (link.forward) {
    link.undirected = link.forward;
  } else {
    link.undirected = link.backward;
  }
  return link;
}

bool conflicting(const SignedNetwork& g, UserId a, UserId b) {
  auto f = g.edge_sign(a, b);
  auto r = g.edge_sign(b, a);
  return f && r && *f != *r;
}

}  // namespace

std::optional<Triad> make_triad(const SignedNetwork& g, UserId a, UserId b, UserId c, TriadMode mode) {
  std::array<UserId, 3> n{a, b, c};
  std::sort(n.begin(), n.end());
  if (n[0] == n[1] || n[1] == n[2]) throw std::invalid_argument("make_triad: nodes must be distinct");
  Triad t;
  t.nodes = n;
  t.links[0] = link_between(g, n[0], n[1]);
  t.links[1] = link_between(g, n[1], n[2]);
  t.links[2] = link_between(g, n[0], n[2]);
  for (const auto& l : t.links) {
    if (!l.forward && !l.backward) return std::nullopt;
    if (mode == TriadMode::UndirectedSigns && !l.undirected) return std::nullopt;
  }
  return t;
}

std::size_t for_each_triad(const SignedNetwork& g, TriadMode mode, const std::function<void(const Triad&)>& visit) {
  const auto n = g.num_users();
  std::size_t conflicts = 0;
  // Skeleton restricted to higher-numbered neighbors, conflicting pairs removed
  // in undirected mode.
  std::vector<std::vector<UserId>> higher(static_cast<std::size_t>(n));
  for (UserId u = 0; u < n; ++u) {
    for (auto v : g.neighbors(u)) {
      if (v <= u) continue;
      if (conflicting(g, u, v)) {
        ++conflicts;
        if (mode == TriadMode::UndirectedSigns) continue;
      }
      higher[static_cast<std::size_t>(u)].push_back(v);
    }
  }
  for (UserId u = 0; u < n; ++u) {
    const auto& hu = higher[static_cast<std::size_t>(u)];
    for (auto v : hu) {
      const auto& hv = higher[static_cast<std::size_t>(v)];
      auto i = std::upper_bound(hu.begin(), hu.end(), v);
      auto j = hv.begin();
      while (i != hu.end() && j != hv.end()) {
        if (*i < *j) {
          ++i;
        } else if (*j < *i) {
          ++j;
        } else {
          Triad t;
          t.nodes = {u, v, *i};
          t.links[0] = link_between(g, u, v);
          t.links[1] = link_between(g, v, *i);
          t.links[2] = link_between(g, u, *i);
          visit(t);
          ++i;
          ++j;
        }
      }
    }
  }
  return conflicts;
}

TriadEnumeration enumerate_triads(const SignedNetwork& g, TriadMode mode) {
  TriadEnumeration result;
  result.conflicting_pairs = for_each_triad(g, mode, [&](const Triad& t) { result.triads.push_back(t); });
  return result;
}

bool is_balanced(const Triad& t) {
  int negatives = 0;
  for (const auto& l : t.links) {
    if (!l.undirected) throw std::invalid_argument("is_balanced: triad lacks an undirected sign");
    if (*l.undirected == Sign::Negative) ++negatives;
  }
  return negatives == 0 || negatives == 2;
}

bool satisfies_status(const Triad& t) {
  // Orientation of each pair after the transform: +1 first->second,
  // -1 second->first, 0 no ordering.
  std::array<int, 3> orient{};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& l = t.links[k];
    if (!l.forward && !l.backward) throw std::invalid_argument("satisfies_status: triad lacks an edge");
    bool fwd = false, bwd = false;
    if (l.forward) (*l.forward == Sign::Positive ? fwd : bwd) = true;
    if (l.backward) (*l.backward == Sign::Positive ? bwd : fwd) = true;
    orient[k] = fwd == bwd ? 0 : (fwd ? 1 : -1);
  }
  // links: 0 = (n0,n1), 1 = (n1,n2), 2 = (n0,n2). The cycles are
  // n0->n1->n2->n0 and its reverse.
  if (orient[0] == 1 && orient[1] == 1 && orient[2] == -1) return false;
  if (orient[0] == -1 && orient[1] == -1 && orient[2] == 1) return false;
  return true;
}

double jaccard(std::span<const UserId> a, std::span<const UserId> b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

}  // namespace nelp
