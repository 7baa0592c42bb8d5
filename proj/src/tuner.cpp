#include "chimera/tuner.hpp"

#include "chimera/metrics.hpp"
#include "detail.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <set>
#include <tuple>

namespace chimera {
namespace {

struct FitKey {
  double alpha, beta, lambda1, lambda2;
  Index rank;
  bool operator==(const FitKey&) const = default;
};

Hyperparameters trial_hp(const SearchSpace& s, const Hyperparameters& base, std::size_t index, int& clusters) {
  // Mixed radix with clusters varying fastest so consecutive grid points share a fit.
  std::size_t i = index;
  auto take = [&i](std::size_t radix) {
    const std::size_t digit = i % radix;
    i /= radix;
    return digit;
  };
  clusters = s.clusters[take(s.clusters.size())];
  Hyperparameters hp = base;
  hp.rank = s.rank[take(s.rank.size())];
  hp.lambda2 = s.lambda2[take(s.lambda2.size())];
  hp.lambda1 = s.lambda1[take(s.lambda1.size())];
  hp.beta = s.beta[take(s.beta.size())];
  hp.alpha = s.alpha[take(s.alpha.size())];
  return hp;
}

std::vector<std::size_t> trial_order(const SearchSpace& s) {
  const std::size_t total = s.grid_size();
  const auto count = std::min<std::size_t>(total, static_cast<std::size_t>(s.budget));
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  if (s.strategy == SearchStrategy::random) {
    auto rng = detail::make_rng(s.seed, detail::kTunerStream);
    for (std::size_t k = 0; k < count; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, total - 1);
      std::swap(order[k], order[pick(rng)]);
    }
  }
  order.resize(count);
  return order;
}

bool better(double a, double b, Direction d) { return d == Direction::maximize ? a > b : a < b; }

}  // namespace

const char* to_string(SearchStrategy s) { return s == SearchStrategy::grid ? "grid" : "random"; }

SearchStrategy search_strategy_from_string(const std::string& text) {
  if (text == "grid") return SearchStrategy::grid;
  if (text == "random") return SearchStrategy::random;
  throw std::invalid_argument("unknown search strategy '" + text + "'");
}

const char* to_string(Direction d) { return d == Direction::maximize ? "maximize" : "minimize"; }

Direction direction_from_string(const std::string& text) {
  if (text == "maximize" || text == "max") return Direction::maximize;
  if (text == "minimize" || text == "min") return Direction::minimize;
  throw std::invalid_argument("unknown objective direction '" + text + "'");
}

std::size_t SearchSpace::grid_size() const noexcept {
  return alpha.size() * beta.size() * lambda1.size() * lambda2.size() * rank.size() * clusters.size();
}

void validate(const SearchSpace& s) {
  if (s.alpha.empty() || s.beta.empty() || s.lambda1.empty() || s.lambda2.empty() || s.rank.empty() ||
      s.clusters.empty()) {
    throw std::invalid_argument("every search-space candidate set must be non-empty");
  }
  if (s.budget < 1) throw std::invalid_argument("search budget must be at least 1");
  if (std::any_of(s.clusters.begin(), s.clusters.end(), [](int c) { return c < 1; })) {
    throw std::invalid_argument("cluster candidates must be at least 1");
  }
}

TuneResult tune(const TemporalNetwork& network, const SearchSpace& space, const TuneOptions& options) {
  validate(space);
  validate(options.base);

  TuneResult result;
  result.direction = options.direction;
  std::optional<std::pair<FitKey, FitResult>> cached;
  std::optional<std::size_t> best;

  const auto order = trial_order(space);
  for (std::size_t n = 0; n < order.size(); ++n) {
    const auto start = std::chrono::steady_clock::now();
    TrialRecord rec;
    rec.index = static_cast<int>(n);
    rec.hp = trial_hp(space, options.base, order[n], rec.clusters);
    const FitKey key{rec.hp.alpha, rec.hp.beta, rec.hp.lambda1, rec.hp.lambda2, rec.hp.rank};
    try {
      if (!cached || !(cached->first == key)) {
        cached.reset();
        cached.emplace(key, fit(network, rec.hp));
      }
      const FitResult& fitted = cached->second;
      rec.iterations = fitted.iterations;
      rec.alpha_used = fitted.alpha_used;
      const auto tail = std::min<std::size_t>(5, fitted.trace.size());
      rec.objective_tail.assign(fitted.trace.end() - static_cast<std::ptrdiff_t>(tail), fitted.trace.end());

      const StackedEmbeddings stacked = stack_embeddings(fitted.model);
      const KMeansResult km = kmeans(stacked.rows, rec.clusters, options.kmeans);
      const std::set<int> used(km.labels.begin(), km.labels.end());
      if (used.size() < 2) {
        rec.degenerate = true;
        rec.error = "single non-empty cluster";
      } else {
        rec.score = silhouette(stacked.rows, km.labels);
      }
    } catch (const std::exception& e) {
      cached.reset();
      rec.degenerate = true;
      rec.error = e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!rec.degenerate && (!best || better(rec.score, result.trials[*best].score, options.direction))) {
      best = result.trials.size();
    }
    result.trials.push_back(std::move(rec));
  }
  if (!best) throw TuneError("every tuning trial was degenerate", result.trials);
  result.best = result.trials[*best];
  return result;
}

}  // namespace chimera
