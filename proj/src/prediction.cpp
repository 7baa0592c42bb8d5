#include "chimera/prediction.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace chimera {

const char* to_string(TrackPolicy policy) {
  return policy == TrackPolicy::embedding_support ? "embedding-support" : "adjacency-support";
}

TrackPolicy track_policy_from_string(const std::string& text) {
  if (text == "embedding-support" || text == "u") return TrackPolicy::embedding_support;
  if (text == "adjacency-support" || text == "a") return TrackPolicy::adjacency_support;
  throw std::invalid_argument("unknown track policy '" + text + "'");
}

const char* to_string(FallbackPolicy policy) {
  return policy == FallbackPolicy::last_value ? "last-value" : "mean";
}

FallbackPolicy fallback_policy_from_string(const std::string& text) {
  if (text == "last-value") return FallbackPolicy::last_value;
  if (text == "mean") return FallbackPolicy::mean;
  throw std::invalid_argument("unknown fallback policy '" + text + "'");
}

SeriesSet build_series(const FactorModel& model, TrackPolicy policy, const TemporalNetwork* network) {
  SeriesSet out;
  out.nodes = model.nodes();
  out.rank = model.rank();
  out.policy = policy;
  const Index T = model.timestamps();

  std::vector<bool> node_active;
  if (policy == TrackPolicy::adjacency_support) {
    if (network == nullptr) throw std::invalid_argument("adjacency-support tracking needs the network");
    if (network->nodes() != model.nodes()) throw std::invalid_argument("network and model node counts differ");
    node_active.assign(static_cast<std::size_t>(model.nodes()), false);
    for (Index t = 0; t < network->timestamps(); ++t) {
      const SparseMatrix& a = network->adjacency(t);
      for (Index r = 0; r < a.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
          if (it.value() == 0.0) continue;
          node_active[static_cast<std::size_t>(it.row())] = true;
          node_active[static_cast<std::size_t>(it.col())] = true;
        }
      }
    }
  }

  for (Index i = 0; i < model.nodes(); ++i) {
    for (Index j = 0; j < model.rank(); ++j) {
      std::vector<double> s(static_cast<std::size_t>(T));
      bool any_positive = false;
      for (Index t = 0; t < T; ++t) {
        s[static_cast<std::size_t>(t)] = model.U[static_cast<std::size_t>(t)](i, j);
        any_positive = any_positive || s[static_cast<std::size_t>(t)] > 0.0;
      }
      const bool tracked = policy == TrackPolicy::embedding_support ? any_positive
                                                                    : node_active[static_cast<std::size_t>(i)];
      if (!tracked) continue;
      out.coordinates.emplace_back(i, j);
      out.series.push_back(std::move(s));
    }
  }
  return out;
}

bool is_stationary(std::span<const double> coefficients) {
  const auto p = static_cast<Index>(coefficients.size());
  if (p == 0) return true;
  // Companion matrix of x_t = sum_q a_q x_{t-q}; stationary iff every root lies inside the unit circle.
  Matrix companion = Matrix::Zero(p, p);
  for (Index q = 0; q < p; ++q) companion(0, q) = coefficients[static_cast<std::size_t>(q)];
  for (Index q = 1; q < p; ++q) companion(q, q - 1) = 1.0;
  const Eigen::VectorXcd roots = companion.eigenvalues();
  return roots.cwiseAbs().maxCoeff() < 1.0;
}

double ArModel::next(std::span<const double> history) const {
  if (history.empty()) throw std::invalid_argument("cannot forecast from an empty history");
  if (uses_fallback) {
    if (fallback == FallbackPolicy::last_value) return history.back();
    return std::accumulate(history.begin(), history.end(), 0.0) / static_cast<double>(history.size());
  }
  if (history.size() < coefficients.size()) throw std::invalid_argument("history shorter than the AR order");
  double x = intercept;
  const std::size_t n = history.size();
  for (std::size_t q = 0; q < coefficients.size(); ++q) x += coefficients[q] * history[n - 1 - q];
  return x;
}

ArModel fit_ar(std::span<const double> series, int order, const ArOptions& options) {
  if (order < 1) throw std::invalid_argument("AR order must be at least 1");
  ArModel ar;
  ar.fallback = options.fallback;
  const auto T = static_cast<Index>(series.size());
  const Index p = order;
  const Index params = p + (options.intercept ? 1 : 0);
  const Index rows = T - p;
  if (rows < p + 1) {
    ar.uses_fallback = true;
    return ar;
  }

  Matrix x(rows, params);
  Eigen::VectorXd y(rows);
  for (Index r = 0; r < rows; ++r) {
    const Index t = r + p;  // target index
    y(r) = series[static_cast<std::size_t>(t)];
    Index col = 0;
    if (options.intercept) x(r, col++) = 1.0;
    for (Index q = 1; q <= p; ++q) x(r, col++) = series[static_cast<std::size_t>(t - q)];
  }

  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || (smax / smin) * (smax / smin) > options.max_condition) {
    ar.uses_fallback = true;
    return ar;
  }
  const Eigen::VectorXd beta = svd.solve(y);
  Index col = 0;
  if (options.intercept) ar.intercept = beta(col++);
  for (Index q = 0; q < p; ++q) ar.coefficients.push_back(beta(col++));
  if (options.stationary_only && !is_stationary(ar.coefficients)) {
    ar.coefficients.clear();
    ar.intercept = 0.0;
    ar.uses_fallback = true;
  }
  return ar;
}

double forecast(const ArModel& ar, std::span<const double> history, int horizon) {
  if (horizon < 1) throw std::invalid_argument("forecast horizon must be at least 1");
  std::vector<double> h(history.begin(), history.end());
  double x = 0.0;
  for (int step = 0; step < horizon; ++step) {
    x = ar.next(h);
    if (!std::isfinite(x) || x < 0.0) x = 0.0;
    h.push_back(x);
  }
  return x;
}

int default_ar_order(Index timestamps) {
  return static_cast<int>(std::max<Index>(1, std::min<Index>(2, (timestamps - 1) / 2)));
}

ForecastModel fit_forecast_model(const FactorModel& model, int order, const ArOptions& options,
                                 TrackPolicy policy, const TemporalNetwork* network) {
  ForecastModel fm;
  fm.order = order;
  fm.options = options;
  fm.series = build_series(model, policy, network);
  fm.models.reserve(fm.series.series.size());
  for (const auto& s : fm.series.series) fm.models.push_back(fit_ar(s, order, options));
  return fm;
}

Matrix predict_embedding(const ForecastModel& fm, int horizon) {
  if (horizon < 1) throw std::invalid_argument("forecast horizon must be at least 1");
  Matrix out = Matrix::Zero(fm.series.nodes, fm.series.rank);
  for (std::size_t e = 0; e < fm.models.size(); ++e) {
    const auto [i, j] = fm.series.coordinates[e];
    out(i, j) = forecast(fm.models[e], fm.series.series[e], horizon);
  }
  return out;
}

Matrix predict_embedding(const FactorModel& model, int horizon, int order, const ArOptions& options) {
  return predict_embedding(fit_forecast_model(model, order, options), horizon);
}

PredictedCommunities predict_communities(const ForecastModel& fm, int horizon, int clusters,
                                         const KMeansOptions& kmeans_options) {
  PredictedCommunities out;
  out.embedding = predict_embedding(fm, horizon);
  KMeansResult km = kmeans(out.embedding, clusters, kmeans_options);
  out.labels = std::move(km.labels);
  out.centroids = std::move(km.centroids);
  out.clusters = clusters;
  out.inertia = km.inertia;
  return out;
}

PredictedCommunities predict_communities(const FactorModel& model, int horizon, int order, int clusters,
                                         const KMeansOptions& kmeans_options) {
  return predict_communities(fit_forecast_model(model, order), horizon, clusters, kmeans_options);
}

}  // namespace chimera
