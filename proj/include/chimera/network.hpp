#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <vector>

namespace chimera {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// A sequence of graph snapshots over a fixed node set. Snapshot t carries an
/// n x n adjacency matrix and an n x d content (term weight) matrix.
///
/// Timestamps are 0-based in this API. All entries are finite and non-negative;
/// undirected networks hold symmetric adjacency matrices. A term count of zero is
/// allowed and reduces the model to a link-only factorization.
class TemporalNetwork {
 public:
  /// Throws std::invalid_argument when any invariant is violated.
  TemporalNetwork(std::vector<SparseMatrix> adjacency, std::vector<SparseMatrix> content,
                  bool directed);

  Index nodes() const noexcept { return nodes_; }
  Index terms() const noexcept { return terms_; }
  Index timestamps() const noexcept { return static_cast<Index>(adjacency_.size()); }
  bool directed() const noexcept { return directed_; }

  const SparseMatrix& adjacency(Index t) const { return adjacency_.at(static_cast<std::size_t>(t)); }
  const SparseMatrix& content(Index t) const { return content_.at(static_cast<std::size_t>(t)); }

  /// Builds snapshot matrices from triplets; duplicate coordinates are summed.
  /// For undirected networks each edge may be listed once and is mirrored.
  static TemporalNetwork from_triplets(Index nodes, Index terms,
                                       const std::vector<std::vector<Triplet>>& edges,
                                       const std::vector<std::vector<Triplet>>& content,
                                       bool directed);

  /// Relabels nodes so that new index perm[i] holds old node i.
  TemporalNetwork permuted(const std::vector<Index>& perm) const;

 private:
  std::vector<SparseMatrix> adjacency_;
  std::vector<SparseMatrix> content_;
  Index nodes_ = 0;
  Index terms_ = 0;
  bool directed_ = false;
};

}  // namespace chimera
