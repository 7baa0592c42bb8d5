#pragma once

// Test-only oracles. Everything here is computed with plain scalar loops and
// must stay independent of the library's matrix code paths.

#include "chimera/chimera.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

namespace chimera::testing {

struct Instance {
  TemporalNetwork network;
  FactorModel model;
};

/// Random undirected instance with roughly half of the adjacency and content
/// entries zero and a random non-negative model.
inline Instance random_instance(Index n, Index d, Index T, Index k, std::uint64_t seed, bool directed = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SparseMatrix> adjacency;
  std::vector<SparseMatrix> content;
  for (Index t = 0; t < T; ++t) {
    Matrix a = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = directed ? 0 : i; j < n; ++j) {
        if (unit(rng) < 0.5) continue;
        a(i, j) = 0.5 + 2.0 * unit(rng);
        if (!directed) a(j, i) = a(i, j);
      }
    }
    Matrix c = Matrix::Zero(n, d);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) {
        if (unit(rng) < 0.5) c(i, j) = 3.0 * unit(rng);
      }
    }
    adjacency.push_back(a.sparseView());
    content.push_back(c.sparseView());
  }
  TemporalNetwork network(std::move(adjacency), std::move(content), directed);
  FactorModel model;
  auto fill = [&](Index r, Index cols) {
    Matrix m(r, cols);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < cols; ++j) m(i, j) = unit(rng);
    return m;
  };
  for (Index t = 0; t < T; ++t) model.U.push_back(fill(n, k));
  model.V = fill(n, k);
  model.W = fill(d, k);
  return {std::move(network), std::move(model)};
}

inline double dense_entry(const SparseMatrix& m, Index i, Index j) { return m.coeff(i, j); }

/// Objective by explicit summation over every active coordinate.
inline double scalar_objective(const TemporalNetwork& net, const FactorModel& model, const Hyperparameters& hp,
                               const ActiveMask& mask) {
  const Index n = net.nodes();
  const Index d = net.terms();
  const Index k = model.rank();
  const Index T = net.timestamps();
  auto predict = [&](const Matrix& u, const Matrix& f, Index i, Index j) {
    double s = 0.0;
    for (Index q = 0; q < k; ++q) s += u(i, q) * f(j, q);
    return s;
  };
  double structural = 0.0;
  double content = 0.0;
  double norms = 0.0;
  double smooth = 0.0;
  for (Index t = 0; t < T; ++t) {
    const Matrix& u = model.U[static_cast<std::size_t>(t)];
    const TimestampMask& m = mask.timestamps[static_cast<std::size_t>(t)];
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        bool active = m.dense;
        if (!active) {
          for (SparseMatrix::InnerIterator it(m.observed, i); it; ++it) active = active || it.col() == j;
        }
        if (!active) continue;
        const double r = dense_entry(net.adjacency(t), i, j) - predict(u, model.V, i, j);
        structural += r * r;
      }
      for (Index j = 0; j < d; ++j) {
        const double r = dense_entry(net.content(t), i, j) - predict(u, model.W, i, j);
        content += r * r;
      }
      for (Index q = 0; q < k; ++q) norms += u(i, q) * u(i, q);
    }
    if (t + 1 < T) {
      const Matrix& next = model.U[static_cast<std::size_t>(t + 1)];
      for (Index i = 0; i < n; ++i)
        for (Index q = 0; q < k; ++q) smooth += (next(i, q) - u(i, q)) * (next(i, q) - u(i, q));
    }
  }
  for (Index i = 0; i < n; ++i)
    for (Index q = 0; q < k; ++q) norms += model.V(i, q) * model.V(i, q);
  for (Index i = 0; i < d; ++i)
    for (Index q = 0; q < k; ++q) norms += model.W(i, q) * model.W(i, q);
  return structural + hp.beta * content + hp.lambda1 * norms + hp.lambda2 * smooth;
}

/// Visits every scalar parameter of a model as (matrix pointer, row, col).
inline void for_each_parameter(FactorModel& model, const std::function<void(Matrix&, Index, Index)>& f) {
  for (auto& u : model.U)
    for (Index i = 0; i < u.rows(); ++i)
      for (Index j = 0; j < u.cols(); ++j) f(u, i, j);
  for (Index i = 0; i < model.V.rows(); ++i)
    for (Index j = 0; j < model.V.cols(); ++j) f(model.V, i, j);
  for (Index i = 0; i < model.W.rows(); ++i)
    for (Index j = 0; j < model.W.cols(); ++j) f(model.W, i, j);
}

/// Central finite differences of the scalar objective oracle, in the same
/// parameter order as for_each_parameter.
inline std::vector<double> finite_difference_gradient(const TemporalNetwork& net, const FactorModel& model,
                                                      const Hyperparameters& hp, const ActiveMask& mask,
                                                      double h = 1e-6) {
  std::vector<double> out;
  FactorModel work = model;
  for_each_parameter(work, [&](Matrix& m, Index i, Index j) {
    const double x = m(i, j);
    m(i, j) = x + h;
    const double up = scalar_objective(net, work, hp, mask);
    m(i, j) = x - h;
    const double down = scalar_objective(net, work, hp, mask);
    m(i, j) = x;
    out.push_back((up - down) / (2.0 * h));
  });
  return out;
}

inline std::vector<double> flatten(const Gradients& g) {
  FactorModel as_model{g.U, g.V, g.W};
  std::vector<double> out;
  for_each_parameter(as_model, [&](Matrix& m, Index i, Index j) { out.push_back(m(i, j)); });
  return out;
}

inline bool gradient_close(double analytic, double numeric, double rel = 1e-4, double abs_floor = 1e-8) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  return std::abs(analytic - numeric) <= std::max(rel * scale, abs_floor);
}

// ---------------------------------------------------------------- metric oracles

/// Dominant-class count per cluster, by direct counting.
inline double brute_purity(const std::vector<int>& pred, const std::vector<int>& truth) {
  const int kp = *std::max_element(pred.begin(), pred.end()) + 1;
  const int kt = *std::max_element(truth.begin(), truth.end()) + 1;
  int dominant = 0;
  for (int c = 0; c < kp; ++c) {
    int best = 0;
    for (int cls = 0; cls < kt; ++cls) {
      int count = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) count += (pred[i] == c && truth[i] == cls) ? 1 : 0;
      best = std::max(best, count);
    }
    dominant += best;
  }
  return static_cast<double>(dominant) / static_cast<double>(pred.size());
}

/// Pair-counting Jaccard by enumerating every unordered pair.
inline double brute_jaccard(const std::vector<int>& pred, const std::vector<int>& truth) {
  long both = 0;
  long either = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = i + 1; j < pred.size(); ++j) {
      const bool sp = pred[i] == pred[j];
      const bool st = truth[i] == truth[j];
      both += (sp && st) ? 1 : 0;
      either += (sp || st) ? 1 : 0;
    }
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

/// Every set partition of m items as restricted-growth strings.
inline std::vector<std::vector<int>> all_partitions(int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> a(static_cast<std::size_t>(m), 0);
  std::function<void(int, int)> rec = [&](int pos, int max_label) {
    if (pos == m) {
      out.push_back(a);
      return;
    }
    for (int l = 0; l <= max_label + 1; ++l) {
      a[static_cast<std::size_t>(pos)] = l;
      rec(pos + 1, std::max(max_label, l));
    }
  };
  if (m > 0) {
    a[0] = 0;
    rec(1, 0);
  }
  return out;
}

/// Silhouette of 1-D points straight from the definition.
inline double brute_silhouette_1d(const std::vector<double>& x, const std::vector<int>& labels) {
  const std::size_t m = x.size();
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double own_sum = 0.0;
    int own_count = 0;
    std::map<int, std::pair<double, int>> other;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const double dist = std::abs(x[i] - x[j]);
      if (labels[j] == labels[i]) {
        own_sum += dist;
        ++own_count;
      } else {
        other[labels[j]].first += dist;
        other[labels[j]].second += 1;
      }
    }
    if (own_count == 0) continue;
    const double a = own_sum / own_count;
    double b = 1e300;
    for (const auto& [l, s] : other) b = std::min(b, s.first / s.second);
    const double denom = std::max(a, b);
    if (denom > 0) total += (b - a) / denom;
  }
  return total / static_cast<double>(m);
}

/// Minimum 2-means inertia over every 2-partition of the rows.
inline double brute_two_means_inertia(const Matrix& points) {
  const Index m = points.rows();
  double best = 1e300;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (m - 1)); ++mask) {
    double inertia = 0.0;
    for (int side = 0; side < 2; ++side) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(points.cols());
      int count = 0;
      for (Index i = 0; i < m; ++i) {
        const bool in = (mask >> i) & 1;
        if (in == (side == 1)) {
          mean += points.row(i);
          ++count;
        }
      }
      mean /= count;
      for (Index i = 0; i < m; ++i) {
        const bool in = (mask >> i) & 1;
        if (in == (side == 1)) inertia += (points.row(i) - mean).squaredNorm();
      }
    }
    best = std::min(best, inertia);
  }
  return best;
}

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace chimera::testing
