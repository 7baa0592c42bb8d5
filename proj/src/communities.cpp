#include "chimera/communities.hpp"

#include "detail.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace chimera {
namespace {

struct LloydRun {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> trace;
};

Matrix seed_plus_plus(const Matrix& points, int clusters, std::mt19937_64& rng) {
  const Index m = points.rows();
  Matrix centroids(clusters, points.cols());
  std::uniform_int_distribution<Index> first(0, m - 1);
  centroids.row(0) = points.row(first(rng));
  std::vector<double> nearest(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) nearest[static_cast<std::size_t>(i)] = (points.row(i) - centroids.row(0)).squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < clusters; ++c) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    Index chosen = m - 1;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double running = 0.0;
      for (Index i = 0; i < m; ++i) {
        running += nearest[static_cast<std::size_t>(i)];
        if (running > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = first(rng);
    }
    centroids.row(c) = points.row(chosen);
    for (Index i = 0; i < m; ++i) {
      auto& d = nearest[static_cast<std::size_t>(i)];
      d = std::min(d, (points.row(i) - centroids.row(c)).squaredNorm());
    }
  }
  return centroids;
}

// Assigns every point to its nearest centroid (lowest index on ties) and
// returns the resulting inertia.
double assign(const Matrix& points, const Matrix& centroids, std::vector<int>& labels,
              std::vector<double>& distances) {
  double inertia = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    distances[static_cast<std::size_t>(i)] = best_d;
    inertia += best_d;
  }
  return inertia;
}

LloydRun lloyd(const Matrix& points, int clusters, int max_iters, std::mt19937_64& rng) {
  const Index m = points.rows();
  LloydRun run;
  run.centroids = seed_plus_plus(points, clusters, rng);
  run.labels.assign(static_cast<std::size_t>(m), 0);
  std::vector<double> distances(static_cast<std::size_t>(m));
  run.inertia = assign(points, run.centroids, run.labels, distances);
  run.trace.push_back(run.inertia);

  for (int it = 1; it <= max_iters; ++it) {
    Matrix sums = Matrix::Zero(clusters, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(clusters), 0);
    for (Index i = 0; i < m; ++i) {
      const int c = run.labels[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    std::vector<bool> taken(static_cast<std::size_t>(m), false);
    for (int c = 0; c < clusters; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        run.centroids.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move it onto the point that is worst served by its centroid.
      Index far = -1;
      for (Index i = 0; i < m; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        if (far < 0 || distances[static_cast<std::size_t>(i)] > distances[static_cast<std::size_t>(far)]) far = i;
      }
      taken[static_cast<std::size_t>(far)] = true;
      run.centroids.row(c) = points.row(far);
      distances[static_cast<std::size_t>(far)] = 0.0;
    }
    std::vector<int> previous = run.labels;
    run.inertia = assign(points, run.centroids, run.labels, distances);
    run.trace.push_back(run.inertia);
    run.iterations = it;
    if (previous == run.labels) break;
  }
  return run;
}

}  // namespace

StackedEmbeddings stack_embeddings(const FactorModel& model) {
  StackedEmbeddings s;
  s.nodes = model.nodes();
  s.timestamps = model.timestamps();
  s.rows.resize(s.nodes * s.timestamps, model.rank());
  for (Index t = 0; t < s.timestamps; ++t) {
    s.rows.middleRows(t * s.nodes, s.nodes) = model.U[static_cast<std::size_t>(t)];
  }
  return s;
}

KMeansResult kmeans(const Matrix& input, int clusters, const KMeansOptions& options) {
  if (clusters < 1) throw std::invalid_argument("k-means needs at least one cluster");
  if (input.rows() < clusters) {
    throw std::invalid_argument("k-means needs at least as many points (" + std::to_string(input.rows()) +
                                ") as clusters (" + std::to_string(clusters) + ")");
  }
  if (options.restarts < 1 || options.max_iters < 0) throw std::invalid_argument("invalid k-means options");
  Matrix normalized;
  if (options.normalize_rows) {
    normalized = input;
    for (Index i = 0; i < normalized.rows(); ++i) {
      const double norm = normalized.row(i).norm();
      if (norm > 0.0) normalized.row(i) /= norm;
    }
  }
  const Matrix& points = options.normalize_rows ? normalized : input;

  auto rng = detail::make_rng(options.seed, detail::kKMeansStream);
  LloydRun best;
  for (int r = 0; r < options.restarts; ++r) {
    LloydRun run = lloyd(points, clusters, options.max_iters, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  KMeansResult out;
  out.labels = std::move(best.labels);
  out.centroids = std::move(best.centroids);
  out.inertia = best.inertia;
  out.iterations = best.iterations;
  out.inertia_trace = std::move(best.trace);
  return out;
}

std::vector<Index> CommunityAssignment::members(Index timestamp, int cluster) const {
  std::vector<Index> out;
  const auto& row = labels.at(static_cast<std::size_t>(timestamp));
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] == cluster) out.push_back(static_cast<Index>(i));
  }
  return out;
}

CommunityAssignment detect_communities(const FactorModel& model, int clusters, const KMeansOptions& options) {
  const StackedEmbeddings stacked = stack_embeddings(model);
  KMeansResult km = kmeans(stacked.rows, clusters, options);
  CommunityAssignment out;
  out.clusters = clusters;
  out.centroids = std::move(km.centroids);
  out.inertia = km.inertia;
  out.labels.assign(static_cast<std::size_t>(stacked.timestamps),
                    std::vector<int>(static_cast<std::size_t>(stacked.nodes), 0));
  for (Index row = 0; row < stacked.rows.rows(); ++row) {
    const auto [node, t] = stacked.origin(row);
    out.labels[static_cast<std::size_t>(t)][static_cast<std::size_t>(node)] = km.labels[static_cast<std::size_t>(row)];
  }
  return out;
}

}  // namespace chimera
