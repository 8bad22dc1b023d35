#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nelp/graph.hpp"

namespace nelp::io {

/// Raw contents of one input file plus the name used in error messages.
struct Source {
  std::string name;
  std::string text;
};

/// The files of a dataset. `users` pins the user universe and its order when
/// present; otherwise users are collected from the other training files.
struct Bundle {
  std::string name = "dataset";
  std::optional<Source> users;
  Source positive;
  Source authorship;
  Source opinions;
  std::optional<Source> truth;
};

/// Everything the learning pipeline may see. Ground truth lives elsewhere.
struct Dataset {
  std::string name;
  IdMap users;
  IdMap posts;
  PositiveNetwork positive;
  InteractionData interactions;
  PositiveNetwork::BuildStats edge_stats;
  /// Opinions equal to 0 after the rating transform, which carry no signal.
  std::size_t neutral_opinions = 0;
};

struct GroundTruth {
  /// Sorted, deduplicated, never a self-loop or a positive edge.
  std::vector<Pair> negatives;
  /// Truth pairs that coincide with a positive edge and were dropped.
  std::size_t positive_overlap = 0;
};

struct IngestOptions {
  /// Raw ratings r become +1 if r > t, -1 if r < t, and 0 if r == t.
  std::optional<std::int64_t> rating_threshold;
};

/// Parses the training files only. The truth source, if any, is not read.
Dataset load_dataset(const Bundle& bundle, const IngestOptions& options = {});

/// Parses a truth file against the user ids of `data`. Unknown users throw.
GroundTruth load_truth(const Dataset& data, const Source& truth);

struct Ingested {
  Dataset data;
  std::optional<GroundTruth> truth;
  /// Users dropped for having neither positive nor negative links.
  std::size_t filtered_users = 0;
};

/// Normalization step: users come from every file including the truth, and
/// when a truth file is given users without any positive or negative link
/// are removed together with their posts and opinions.
Ingested ingest(const Bundle& bundle, const IngestOptions& options = {});

struct NormalizedFiles {
  std::string users;
  std::string positive;
  std::string authorship;
  std::string opinions;
  std::optional<std::string> truth;
};

/// Canonical serialization in id order, which ingesting again reproduces
/// byte for byte.
NormalizedFiles serialize(const Dataset& data, const GroundTruth* truth = nullptr);

/// Numeric names first, ordered by value (length then digits), then all other
/// names in byte order.
bool natural_less(const std::string& a, const std::string& b);

}  // namespace nelp::io
