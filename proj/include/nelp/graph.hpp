#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace nelp {

using UserId = std::int32_t;
using PostId = std::int32_t;

/// Ordered user pair (source, target).
struct Pair {
  UserId src = 0;
  UserId dst = 0;

  auto operator<=>(const Pair&) const = default;
};

struct PairHash {
  std::size_t operator()(const Pair& p) const noexcept {
    auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.src)) << 32) |
               static_cast<std::uint32_t>(p.dst);
    key ^= key >> 33;
    key *= 0xff51afd7ed558ccdULL;
    key ^= key >> 33;
    return static_cast<std::size_t>(key);
  }
};

/// Bidirectional map between external string identifiers and dense ids.
class IdMap {
 public:
  /// Returns the dense id of `name`, assigning the next id if unseen.
  std::int32_t intern(const std::string& name);
  std::optional<std::int32_t> find(const std::string& name) const;
  const std::string& name(std::int32_t id) const { return names_.at(static_cast<std::size_t>(id)); }
  std::int32_t size() const { return static_cast<std::int32_t>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  /// Builds a map whose ids follow the given name order.
  static IdMap from_names(std::vector<std::string> names);

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::int32_t> index_;
};

/// Compressed sparse rows with sorted targets.
struct Adjacency {
  std::vector<std::size_t> offsets{0};
  std::vector<UserId> targets;

  std::span<const UserId> row(UserId u) const {
    auto b = offsets[static_cast<std::size_t>(u)];
    auto e = offsets[static_cast<std::size_t>(u) + 1];
    return {targets.data() + b, e - b};
  }
  bool contains(UserId u, UserId v) const;
};

enum class Direction { Directed, Undirected };

/// Directed graph of positive links, immutable after construction.
class PositiveNetwork {
 public:
  struct BuildStats {
    std::size_t self_loops = 0;
    std::size_t duplicates = 0;
  };

  PositiveNetwork() = default;
  /// Self-loops and duplicate edges are dropped and counted in `stats`.
  PositiveNetwork(std::int32_t num_users, std::span<const Pair> edges, BuildStats* stats = nullptr);

  std::int32_t num_users() const { return num_users_; }
  std::size_t num_edges() const { return out_.targets.size(); }

  std::span<const UserId> out(UserId u) const { return out_.row(u); }
  std::span<const UserId> in(UserId u) const { return in_.row(u); }
  /// Sorted union of in- and out-neighbors.
  std::span<const UserId> neighbors(UserId u) const { return und_.row(u); }

  bool has_edge(UserId src, UserId dst) const { return out_.contains(src, dst); }
  /// True when an edge exists in either direction.
  bool linked(UserId a, UserId b) const { return und_.contains(a, b); }

  std::vector<Pair> edges() const;
  void check_user(UserId u) const;

 private:
  std::int32_t num_users_ = 0;
  Adjacency out_;
  Adjacency in_;
  Adjacency und_;
};

enum class Sign : std::int8_t { Negative = -1, Positive = 1 };

struct WeightedEdge {
  UserId src = 0;
  UserId dst = 0;
  double weight = 1.0;
};

/// Positive network plus weighted directed negative edges.
class SignedNetwork {
 public:
  SignedNetwork() = default;
  /// Throws if a negative edge duplicates a positive (src, dst) pair, repeats,
  /// is a self-loop, or carries a weight outside [0, 1].
  SignedNetwork(PositiveNetwork positive, std::span<const WeightedEdge> negatives);

  const PositiveNetwork& positive() const { return positive_; }
  std::int32_t num_users() const { return positive_.num_users(); }
  std::size_t num_negative_edges() const { return neg_out_.targets.size(); }

  std::span<const UserId> negative_out(UserId u) const { return neg_out_.row(u); }
  std::span<const UserId> negative_in(UserId u) const { return neg_in_.row(u); }
  std::span<const double> negative_out_weights(UserId u) const;
  std::span<const double> negative_in_weights(UserId u) const;

  /// Sorted union of all neighbors over both signs and directions.
  std::span<const UserId> neighbors(UserId u) const { return und_.row(u); }

  bool has_negative(UserId src, UserId dst) const { return neg_out_.contains(src, dst); }
  /// Weight of the negative edge src->dst, 0 when absent.
  double negative_weight(UserId src, UserId dst) const;
  /// Sign of the directed edge src->dst, if any.
  std::optional<Sign> edge_sign(UserId src, UserId dst) const;

 private:
  PositiveNetwork positive_;
  Adjacency neg_out_;
  Adjacency neg_in_;
  std::vector<double> neg_out_w_;
  std::vector<double> neg_in_w_;
  Adjacency und_;
};

/// User-by-post authorship and opinions. Only nonzero opinions are stored.
class InteractionData {
 public:
  struct Opinion {
    UserId user = 0;
    PostId post = 0;
    std::int8_t value = 0;
  };

  InteractionData() = default;
  /// `post_author[p]` is the single author of post p. Zero-valued opinions
  /// are discarded; duplicate (user, post) opinions and values outside
  /// {-1, 0, +1} throw.
  InteractionData(std::int32_t num_users, std::vector<UserId> post_author, std::vector<Opinion> opinions);

  std::int32_t num_users() const { return num_users_; }
  std::int32_t num_posts() const { return static_cast<std::int32_t>(author_.size()); }
  UserId author(PostId p) const { return author_.at(static_cast<std::size_t>(p)); }
  std::span<const PostId> posts_by(UserId u) const;
  /// Opinions expressed by `u`, sorted by post.
  std::span<const Opinion> opinions_by(UserId u) const;
  /// Opinions received by post `p`, sorted by user.
  std::span<const Opinion> opinions_on(PostId p) const;
  const std::vector<Opinion>& opinions() const { return by_user_; }
  const std::vector<UserId>& authors() const { return author_; }

 private:
  std::int32_t num_users_ = 0;
  std::vector<UserId> author_;
  std::vector<std::size_t> posts_offsets_;
  std::vector<PostId> posts_;
  std::vector<std::size_t> user_offsets_;
  std::vector<Opinion> by_user_;
  std::vector<std::size_t> post_offsets_;
  std::vector<Opinion> by_post_;
};

/// Sparse nonnegative user-by-user count matrix.
class InteractionMatrix {
 public:
  struct Entry {
    UserId row = 0;
    UserId col = 0;
    std::int32_t count = 0;
  };

  InteractionMatrix() = default;
  /// Entries are summed per (row, col); zero counts are dropped.
  InteractionMatrix(std::int32_t num_users, std::vector<Entry> entries);

  std::int32_t num_users() const { return num_users_; }
  std::size_t nonzeros() const { return cols_.size(); }
  std::int32_t at(UserId i, UserId j) const;
  std::span<const UserId> row_cols(UserId i) const;
  std::span<const std::int32_t> row_counts(UserId i) const;
  std::vector<Entry> entries() const;
  InteractionMatrix transposed() const;

 private:
  std::int32_t num_users_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<UserId> cols_;
  std::vector<std::int32_t> counts_;
};

enum class Polarity { Negative, Positive };

/// Which index of N is the opinion holder.
enum class Orientation {
  /// N[i][j] counts opinions of u_i on posts authored by u_j.
  HolderToAuthor,
  /// The literal -A(O^-)^T product: N[i][j] counts opinions received by
  /// author u_i from u_j.
  AuthorToHolder,
};

/// Counts opinions of the given polarity from holder to author.
InteractionMatrix compute_interactions(const InteractionData& data, Polarity polarity,
                                       Orientation orientation = Orientation::HolderToAuthor);

inline InteractionMatrix compute_negative_interactions(const InteractionData& data,
                                                       Orientation orientation = Orientation::HolderToAuthor) {
  return compute_interactions(data, Polarity::Negative, orientation);
}

struct PathLength {
  enum class Kind { Finite, BeyondCap, Unreachable };
  Kind kind = Kind::Unreachable;
  int hops = 0;

  bool finite() const { return kind == Kind::Finite; }
};

/// BFS hop distance from src to dst. Throws on src == dst or cap < 1.
PathLength shortest_path_length(const PositiveNetwork& g, UserId src, UserId dst, int cap,
                                Direction direction = Direction::Directed);

/// Hop distances from src to every user, -1 when beyond `cap` or unreachable.
std::vector<int> bfs_distances(const PositiveNetwork& g, UserId src, int cap,
                               Direction direction = Direction::Directed);

/// One pair of a triad. `forward` is the edge from the pair's first node to
/// its second, `backward` the reverse; `undirected` is the collapsed sign.
struct TriadLink {
  std::optional<Sign> forward;
  std::optional<Sign> backward;
  std::optional<Sign> undirected;
};

/// Closed triple with nodes[0] < nodes[1] < nodes[2]. links[0] joins
/// nodes 0-1, links[1] joins 1-2, links[2] joins 0-2.
struct Triad {
  std::array<UserId, 3> nodes{};
  std::array<TriadLink, 3> links{};
};

enum class TriadMode { UndirectedSigns, DirectedSigned };

/// Visits every closed triple once. Returns the number of reciprocal pairs
/// with conflicting signs, which are excluded in undirected mode.
std::size_t for_each_triad(const SignedNetwork& g, TriadMode mode, const std::function<void(const Triad&)>& visit);

struct TriadEnumeration {
  std::vector<Triad> triads;
  std::size_t conflicting_pairs = 0;
};

TriadEnumeration enumerate_triads(const SignedNetwork& g, TriadMode mode);

/// Builds the triad on three distinct users from whatever edges exist.
/// Returns nullopt if some pair is unlinked.
std::optional<Triad> make_triad(const SignedNetwork& g, UserId a, UserId b, UserId c, TriadMode mode);

/// True iff the undirected sign multiset is {+,+,+} or {+,-,-}.
bool is_balanced(const Triad& t);

/// True iff, after reversing and sign-flipping every negative edge, the
/// resulting positive triangle is acyclic. Reciprocal pairs whose transformed
/// edges point both ways impose no ordering.
bool satisfies_status(const Triad& t);

/// |a ∩ b| / |a ∪ b| over sorted id sets; 0 when both are empty.
double jaccard(std::span<const UserId> a, std::span<const UserId> b);

}  // namespace nelp
