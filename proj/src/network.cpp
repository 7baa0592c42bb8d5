#include "chimera/network.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chimera {
namespace {

void check_entries(const SparseMatrix& m, const char* what, std::size_t t) {
  for (Index r = 0; r < m.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (!std::isfinite(it.value()) || it.value() < 0.0) {
        throw std::invalid_argument(std::string(what) + "[" + std::to_string(t) +
                                    "] has a negative or non-finite entry at (" +
                                    std::to_string(it.row()) + ", " + std::to_string(it.col()) +
                                    ")");
      }
    }
  }
}

bool is_symmetric(const SparseMatrix& m) {
  SparseMatrix transposed = m.transpose();
  SparseMatrix diff = m - transposed;
  diff.prune(0.0);
  return diff.nonZeros() == 0;
}

}  // namespace

TemporalNetwork::TemporalNetwork(std::vector<SparseMatrix> adjacency,
                                 std::vector<SparseMatrix> content, bool directed)
    : adjacency_(std::move(adjacency)), content_(std::move(content)), directed_(directed) {
  if (adjacency_.empty()) throw std::invalid_argument("temporal network needs at least one timestamp");
  if (content_.size() != adjacency_.size()) {
    throw std::invalid_argument("content and adjacency timestamp counts differ");
  }
  nodes_ = adjacency_.front().rows();
  terms_ = content_.front().cols();
  if (nodes_ < 1) throw std::invalid_argument("temporal network needs at least one node");
  for (std::size_t t = 0; t < adjacency_.size(); ++t) {
    auto& a = adjacency_[t];
    auto& c = content_[t];
    if (a.rows() != nodes_ || a.cols() != nodes_) {
      throw std::invalid_argument("adjacency[" + std::to_string(t) + "] is not " +
                                  std::to_string(nodes_) + "x" + std::to_string(nodes_));
    }
    if (c.rows() != nodes_ || c.cols() != terms_) {
      throw std::invalid_argument("content[" + std::to_string(t) + "] is not " +
                                  std::to_string(nodes_) + "x" + std::to_string(terms_));
    }
    a.makeCompressed();
    c.makeCompressed();
    check_entries(a, "adjacency", t);
    check_entries(c, "content", t);
    if (!directed_ && !is_symmetric(a)) {
      throw std::invalid_argument("adjacency[" + std::to_string(t) +
                                  "] is not symmetric but the network is undirected");
    }
  }
}

TemporalNetwork TemporalNetwork::from_triplets(Index nodes, Index terms,
                                               const std::vector<std::vector<Triplet>>& edges,
                                               const std::vector<std::vector<Triplet>>& content,
                                               bool directed) {
  if (edges.size() != content.size()) {
    throw std::invalid_argument("edge and content timestamp counts differ");
  }
  std::vector<SparseMatrix> adjacency;
  std::vector<SparseMatrix> content_matrices;
  for (std::size_t t = 0; t < edges.size(); ++t) {
    std::vector<Triplet> entries;
    entries.reserve(edges[t].size() * 2);
    for (const auto& e : edges[t]) {
      if (e.row() < 0 || e.row() >= nodes || e.col() < 0 || e.col() >= nodes) {
        throw std::invalid_argument("edge index out of range at timestamp " + std::to_string(t));
      }
      entries.push_back(e);
      if (!directed && e.row() != e.col()) entries.emplace_back(e.col(), e.row(), e.value());
    }
    SparseMatrix a(nodes, nodes);
    a.setFromTriplets(entries.begin(), entries.end());
    adjacency.push_back(std::move(a));

    for (const auto& e : content[t]) {
      if (e.row() < 0 || e.row() >= nodes || e.col() < 0 || e.col() >= terms) {
        throw std::invalid_argument("content index out of range at timestamp " + std::to_string(t));
      }
    }
    SparseMatrix c(nodes, terms);
    c.setFromTriplets(content[t].begin(), content[t].end());
    content_matrices.push_back(std::move(c));
  }
  return TemporalNetwork(std::move(adjacency), std::move(content_matrices), directed);
}

TemporalNetwork TemporalNetwork::permuted(const std::vector<Index>& perm) const {
  if (static_cast<Index>(perm.size()) != nodes_) {
    throw std::invalid_argument("permutation size does not match node count");
  }
  std::vector<bool> seen(static_cast<std::size_t>(nodes_), false);
  for (Index target : perm) {
    if (target < 0 || target >= nodes_ || seen[static_cast<std::size_t>(target)]) {
      throw std::invalid_argument("not a permutation of the node indices");
    }
    seen[static_cast<std::size_t>(target)] = true;
  }
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> p(nodes_);
  for (Index i = 0; i < nodes_; ++i) p.indices()[i] = static_cast<int>(perm[static_cast<std::size_t>(i)]);
  std::vector<SparseMatrix> permuted_adjacency;
  std::vector<SparseMatrix> permuted_content;
  for (Index t = 0; t < timestamps(); ++t) {
    SparseMatrix a = (p * adjacency(t) * p.transpose()).eval();
    SparseMatrix c = (p * content(t)).eval();
    permuted_adjacency.push_back(std::move(a));
    permuted_content.push_back(std::move(c));
  }
  return TemporalNetwork(std::move(permuted_adjacency), std::move(permuted_content), directed_);
}

}  // namespace chimera
