#pragma once

#include "chimera/factorization.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace chimera {

/// y ~ c0 + c1 x + c2 x^2 by least squares.
struct QuadraticFit {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double r_squared = 0.0;

  double operator()(double x) const noexcept { return c0 + c1 * x + c2 * x * x; }
};

/// Needs at least three points with distinct x.
QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y);

/// Fixed-iteration timing of the factorization on synthetic networks of
/// increasing size. Defaults mirror the published scaling experiment.
struct BenchOptions {
  std::vector<Index> sizes{250, 500, 1000, 2000};
  Index timestamps = 3;
  Index edges_per_node = 4;
  int iterations = 1000;
  double neg_sample_ratio = 0.0;  // dense structural loss
  Hyperparameters hp = [] {
    Hyperparameters h;
    h.alpha = 0.001;
    h.beta = 0.001;
    h.lambda1 = 0.005;
    h.lambda2 = 0.001;
    h.rank = 2;
    h.tol = 0.0;
    return h;
  }();
  std::uint64_t seed = 0;
};

struct BenchPoint {
  Index nodes = 0;
  double seconds = 0.0;
  int iterations = 0;
  double alpha_used = 0.0;
};

struct BenchReport {
  std::vector<BenchPoint> points;
  QuadraticFit fit;
};

BenchReport run_bench(const BenchOptions& options);

}  // namespace chimera
