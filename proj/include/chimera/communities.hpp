#pragma once

#include "chimera/factorization.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace chimera {

/// The n * T embedding rows stacked timestamp-major: row t * n + i holds U_t row i.
struct StackedEmbeddings {
  Matrix rows;
  Index nodes = 0;
  Index timestamps = 0;

  Index row_of(Index node, Index timestamp) const noexcept { return timestamp * nodes + node; }
  /// (node, timestamp) for a stacked row.
  std::pair<Index, Index> origin(Index row) const noexcept { return {row % nodes, row / nodes}; }
};

StackedEmbeddings stack_embeddings(const FactorModel& model);

struct KMeansOptions {
  std::uint64_t seed = 0;
  int restarts = 10;
  int max_iters = 300;
  bool normalize_rows = false;  // scale each row to unit length before clustering
};

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;  // c x dims
  double inertia = 0.0;
  int iterations = 0;
  std::vector<double> inertia_trace;  // per Lloyd iteration of the winning restart
};

/// Lloyd's algorithm from k-means++ seeds, best of `restarts` by inertia.
/// Clusters that lose all members are re-seeded with the point farthest from
/// its own centroid. Throws std::invalid_argument when points < clusters.
KMeansResult kmeans(const Matrix& points, int clusters, const KMeansOptions& options = {});

struct CommunityAssignment {
  std::vector<std::vector<int>> labels;  // labels[t][node], ids shared across timestamps
  Matrix centroids;
  int clusters = 0;
  double inertia = 0.0;

  /// Members of global cluster `cluster` at timestamp t. May be empty.
  std::vector<Index> members(Index timestamp, int cluster) const;
};

/// Clusters all stacked embedding rows at once and splits the global clusters
/// by timestamp, so a node keeps its label unless its row drifts.
CommunityAssignment detect_communities(const FactorModel& model, int clusters,
                                       const KMeansOptions& options = {});

}  // namespace chimera
