#pragma once

#include <cstdint>
#include <vector>

#include "nelp/dataset.hpp"

namespace nelp::io {

/// Synthetic signed network with content interactions and known negative
/// links. Users sit on a ring split into two factions; pairs within
/// `window` ring steps may link, positively inside a faction and negatively
/// across, with a few cross-faction friendships as bridges. Negative links
/// then spread to the followers of their targets. Sign noise is calibrated
/// on a noise-free draw so that the census hits the balanced-triad target.
struct PlantedParams {
  std::int32_t users = 2000;
  std::int32_t window = 15;
  /// Factions alternate in runs of this many users along the ring, so every
  /// window sees both sides.
  std::int32_t faction_run = 6;
  /// Probability that a same-faction pair inside the window is linked.
  double positive_density = 0.6;
  /// Probability that a cross-faction pair inside the window is linked.
  double negative_density = 0.015;
  /// Probability that a cross-faction pair inside the window is a
  /// friendship regardless of faction.
  double bridge_density = 0.1;
  /// Expected number of long-range friendships per user, to any user.
  double shortcuts = 2.0;
  /// Chance that the holder of a primary negative link u->v also distrusts
  /// each user with a positive link to v.
  double closure_probability = 0.9;
  /// Expected fraction of balanced triads; sign flips are drawn to match it.
  double balanced_fraction = 0.92;
  /// Probability that a positive link is mutual.
  double reciprocity = 0.4;
  /// Probability that a link points against the status order.
  double status_noise = 0.05;
  /// Posts per user are 1 + Poisson(posts_mean).
  double posts_mean = 4.0;
  /// Chance that the holder of a cross-faction negative link dislikes each
  /// post of its target.
  double dislike_probability = 0.5;
  /// The same for milder negative links: those inside a faction and those
  /// spread from a cross-faction one.
  double mild_dislike_probability = 0.1;
  /// Chance that a user likes each post of a positive neighbor.
  double like_probability = 0.25;
  /// Chance that a user dislikes each post of a positive neighbor.
  double friend_dislike_probability = 0.01;
  /// Expected number of dislikes per user on posts of arbitrary users.
  double background_dislikes = 0.4;
  /// Expected number of likes per user on posts of arbitrary users.
  double background_likes = 1.0;

  void validate() const;
};

/// Sign-flip probability e that moves a network whose triads are balanced
/// at rate `structural` to the target rate, each triad changing balance with
/// probability 3e(1-e)^2 + e^3. Returns 0 when the target lies above the
/// structural rate.
double flip_probability(double balanced_fraction, double structural = 1.0);

struct PlantedDataset {
  Bundle bundle;
  /// Planted negative links in the bundle's user naming.
  std::vector<Pair> negatives;
};

/// Deterministic in (params, seed). Users and posts are named by their
/// decimal index.
PlantedDataset generate_planted(const PlantedParams& params, std::uint64_t seed);

}  // namespace nelp::io
