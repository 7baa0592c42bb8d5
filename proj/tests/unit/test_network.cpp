#include <doctest.h>

#include "chimera/network.hpp"

#include <limits>

using namespace chimera;

namespace {

SparseMatrix dense_to_sparse(const Matrix& m) { return m.sparseView(); }

}  // namespace

TEST_CASE("accessors report the snapshot shapes") {
  Matrix a(3, 3);
  a << 0, 1, 0, 1, 0, 2, 0, 2, 0;
  const TemporalNetwork net({dense_to_sparse(a), dense_to_sparse(a)},
                            {SparseMatrix(3, 4), SparseMatrix(3, 4)}, false);
  CHECK(net.nodes() == 3);
  CHECK(net.terms() == 4);
  CHECK(net.timestamps() == 2);
  CHECK_FALSE(net.directed());
  CHECK(net.adjacency(1).coeff(1, 2) == 2.0);
}

TEST_CASE("invariants are enforced") {
  Matrix asym = Matrix::Zero(2, 2);
  asym(0, 1) = 1.0;
  CHECK_THROWS_AS(TemporalNetwork({dense_to_sparse(asym)}, {SparseMatrix(2, 1)}, false), std::invalid_argument);
  CHECK_NOTHROW(TemporalNetwork({dense_to_sparse(asym)}, {SparseMatrix(2, 1)}, true));

  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = -1.0;
  CHECK_THROWS_AS(TemporalNetwork({dense_to_sparse(neg)}, {SparseMatrix(2, 1)}, true), std::invalid_argument);

  Matrix inf = Matrix::Zero(2, 2);
  inf(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(TemporalNetwork({dense_to_sparse(inf)}, {SparseMatrix(2, 1)}, true), std::invalid_argument);

  CHECK_THROWS_AS(TemporalNetwork({}, {}, true), std::invalid_argument);
  CHECK_THROWS_AS(TemporalNetwork({SparseMatrix(2, 3)}, {SparseMatrix(2, 1)}, true), std::invalid_argument);
  CHECK_THROWS_AS(TemporalNetwork({SparseMatrix(2, 2)}, {SparseMatrix(3, 1)}, true), std::invalid_argument);
  CHECK_THROWS_AS(TemporalNetwork({SparseMatrix(2, 2), SparseMatrix(3, 3)}, {SparseMatrix(2, 1), SparseMatrix(3, 1)},
                                  true),
                  std::invalid_argument);
}

TEST_CASE("from_triplets mirrors undirected edges and sums duplicates") {
  const auto net = TemporalNetwork::from_triplets(2, 1, {{Triplet(0, 1, 1.0), Triplet(0, 1, 0.5)}},
                                                  {{Triplet(1, 0, 3.0)}}, false);
  CHECK(net.adjacency(0).nonZeros() == 2);
  CHECK(net.adjacency(0).coeff(0, 1) == 1.5);
  CHECK(net.adjacency(0).coeff(1, 0) == 1.5);
  CHECK(net.content(0).coeff(1, 0) == 3.0);
}

TEST_CASE("permuted relabels nodes") {
  const auto net = TemporalNetwork::from_triplets(3, 1, {{Triplet(0, 1, 2.0)}}, {{Triplet(2, 0, 1.0)}}, true);
  const auto p = net.permuted({2, 0, 1});
  CHECK(p.adjacency(0).coeff(2, 0) == 2.0);
  CHECK(p.adjacency(0).nonZeros() == 1);
  CHECK(p.content(0).coeff(1, 0) == 1.0);
  CHECK_THROWS_AS(net.permuted({0, 0, 1}), std::invalid_argument);
}
