#pragma once

#include "chimera/network.hpp"

#include <span>

namespace chimera {

/// Share of items that belong to the dominant true class of their cluster.
/// Throws std::invalid_argument on empty or mismatched inputs and negative ids.
double purity(std::span<const int> predicted, std::span<const int> truth);

/// Pair-counting Jaccard index over co-membership of unordered item pairs:
/// |same in both| / |same in at least one|, and 1 when no pair is co-clustered
/// in either partition. Needs at least two items.
double jaccard(std::span<const int> predicted, std::span<const int> truth);

/// Mean silhouette with Euclidean distances. Singleton clusters score 0, as do
/// points whose intra and nearest-cluster distances are both zero. Needs at least
/// three points and two non-empty clusters.
double silhouette(const Matrix& points, std::span<const int> labels);

}  // namespace chimera
