#pragma once

#include "chimera/communities.hpp"
#include "chimera/factorization.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chimera {

enum class SearchStrategy { grid, random };
enum class Direction { maximize, minimize };

const char* to_string(SearchStrategy s);
SearchStrategy search_strategy_from_string(const std::string& text);
const char* to_string(Direction d);
Direction direction_from_string(const std::string& text);

/// Candidate values per hyperparameter. The defaults are the published tuning grid.
struct SearchSpace {
  std::vector<double> alpha{0.01, 0.1};
  std::vector<double> beta{0.1, 0.25, 0.5, 0.75, 0.9};
  std::vector<double> lambda1{1e-5, 1e-6};
  std::vector<double> lambda2{1e-4, 1e-5};
  std::vector<Index> rank{10, 20, 30, 40, 50};
  std::vector<int> clusters{2, 4, 8, 10, 16, 18, 32};
  int budget = 20;
  SearchStrategy strategy = SearchStrategy::random;
  std::uint64_t seed = 0;

  std::size_t grid_size() const noexcept;
};

void validate(const SearchSpace& space);

struct TuneOptions {
  // Fields other than alpha, beta, lambda1, lambda2 and rank are taken from here.
  Hyperparameters base;
  Direction direction = Direction::maximize;
  KMeansOptions kmeans;
};

struct TrialRecord {
  int index = 0;
  Hyperparameters hp;
  int clusters = 0;
  double score = 0.0;          // silhouette; meaningless when degenerate
  bool degenerate = false;     // one non-empty cluster, or the fit failed
  std::string error;
  std::vector<double> objective_tail;
  int iterations = 0;
  double alpha_used = 0.0;  // after automatic step halving
  double seconds = 0.0;
};

struct TuneResult {
  TrialRecord best;
  std::vector<TrialRecord> trials;
  Direction direction = Direction::maximize;
};

class TuneError : public std::runtime_error {
 public:
  TuneError(const std::string& what, std::vector<TrialRecord> trials)
      : std::runtime_error(what), trials_(std::move(trials)) {}
  const std::vector<TrialRecord>& trials() const noexcept { return trials_; }

 private:
  std::vector<TrialRecord> trials_;
};

/// Unsupervised search: each trial fits the model, detects communities and
/// scores the stacked embedding rows by silhouette. Ground truth is never used.
/// Ties go to the earlier trial. Throws TuneError when every trial is degenerate.
TuneResult tune(const TemporalNetwork& network, const SearchSpace& space, const TuneOptions& options = {});

}  // namespace chimera
