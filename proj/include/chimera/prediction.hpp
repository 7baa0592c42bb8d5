#pragma once

#include "chimera/communities.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chimera {

/// Which U coordinates get a time series.
///  - embedding_support: (i, j) is tracked when U_t(i, j) > 0 for some t.
///  - adjacency_support: every coordinate of node i is tracked when node i has
///    an incident edge in some A_t.
enum class TrackPolicy { embedding_support, adjacency_support };
enum class FallbackPolicy { last_value, mean };

const char* to_string(TrackPolicy policy);
TrackPolicy track_policy_from_string(const std::string& text);
const char* to_string(FallbackPolicy policy);
FallbackPolicy fallback_policy_from_string(const std::string& text);

struct SeriesSet {
  std::vector<std::pair<Index, Index>> coordinates;  // (node, factor)
  std::vector<std::vector<double>> series;           // one length-T series per coordinate
  Index nodes = 0;
  Index rank = 0;
  TrackPolicy policy = TrackPolicy::embedding_support;
};

/// `network` is required for TrackPolicy::adjacency_support and ignored otherwise.
SeriesSet build_series(const FactorModel& model, TrackPolicy policy = TrackPolicy::embedding_support,
                       const TemporalNetwork* network = nullptr);

struct ArOptions {
  bool intercept = true;
  FallbackPolicy fallback = FallbackPolicy::last_value;
  double max_condition = 1e12;  // condition estimate of the normal equations
  bool stationary_only = true;  // explosive fits (a root on or outside the unit circle) fall back
};

/// Least-squares AR(p) fit x_t = c + sum_q a_q x_{t-q}, or a fallback rule when
/// there are fewer than p + 1 usable rows, the normal equations are near singular
/// or (with stationary_only) the fitted recursion is explosive.
struct ArModel {
  std::vector<double> coefficients;  // a_1 .. a_p; empty when falling back
  double intercept = 0.0;
  bool uses_fallback = false;
  FallbackPolicy fallback = FallbackPolicy::last_value;

  /// One-step-ahead forecast from the end of `history`.
  double next(std::span<const double> history) const;
};

/// True when every root of the AR characteristic polynomial lies strictly inside the unit circle.
bool is_stationary(std::span<const double> coefficients);

ArModel fit_ar(std::span<const double> series, int order, const ArOptions& options = {});

/// Iterated one-step forecasts, each clamped at zero and fed back as input.
double forecast(const ArModel& ar, std::span<const double> history, int horizon);

/// Default AR order for a series of the given length: min(2, (T - 1) / 2), at least 1.
int default_ar_order(Index timestamps);

struct ForecastModel {
  SeriesSet series;
  std::vector<ArModel> models;  // parallel to series.coordinates
  int order = 1;
  ArOptions options;
};

ForecastModel fit_forecast_model(const FactorModel& model, int order, const ArOptions& options = {},
                                 TrackPolicy policy = TrackPolicy::embedding_support,
                                 const TemporalNetwork* network = nullptr);

/// Forecast of U_{T+horizon}; untracked coordinates are zero.
Matrix predict_embedding(const ForecastModel& forecast_model, int horizon);
Matrix predict_embedding(const FactorModel& model, int horizon, int order, const ArOptions& options = {});

struct PredictedCommunities {
  std::vector<int> labels;  // per node at T + horizon
  Matrix centroids;
  int clusters = 0;
  double inertia = 0.0;
  Matrix embedding;  // the forecast U_{T+horizon}
};

PredictedCommunities predict_communities(const ForecastModel& forecast_model, int horizon, int clusters,
                                         const KMeansOptions& kmeans_options = {});
PredictedCommunities predict_communities(const FactorModel& model, int horizon, int order, int clusters,
                                         const KMeansOptions& kmeans_options = {});

}  // namespace chimera
