#include "chimera/synthetic.hpp"

#include "detail.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace chimera {
namespace {

using Rng = std::mt19937_64;

std::vector<int> initial_groups(Index nodes, int groups) {
  // Contiguous blocks whose sizes differ by at most one.
  std::vector<int> g(static_cast<std::size_t>(nodes));
  const Index base = nodes / groups;
  const Index extra = nodes % groups;
  Index i = 0;
  for (int k = 0; k < groups; ++k) {
    const Index size = base + (k < extra ? 1 : 0);
    for (Index s = 0; s < size; ++s) g[static_cast<std::size_t>(i++)] = k;
  }
  return g;
}

std::vector<std::vector<Index>> members_of(const std::vector<int>& membership, int groups) {
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(groups));
  for (std::size_t i = 0; i < membership.size(); ++i) {
    members[static_cast<std::size_t>(membership[i])].push_back(static_cast<Index>(i));
  }
  return members;
}

int other_group(int own, int groups, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, groups - 2);
  const int g = pick(rng);
  return g >= own ? g + 1 : g;
}

std::vector<int> transition(const std::vector<int>& current, const SyntheticConfig& cfg, Rng& rng) {
  std::vector<int> next = current;
  if (cfg.groups < 2) return next;
  std::bernoulli_distribution moves(cfg.transition_probability);
  std::vector<Index> movers;
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (moves(rng)) movers.push_back(static_cast<Index>(i));
  }
  const auto cap = static_cast<std::size_t>(
      std::floor(cfg.max_transition_fraction * static_cast<double>(cfg.nodes)));
  if (movers.size() > cap) {
    std::shuffle(movers.begin(), movers.end(), rng);
    movers.resize(cap);
    std::sort(movers.begin(), movers.end());
  }
  for (Index i : movers) {
    next[static_cast<std::size_t>(i)] = other_group(current[static_cast<std::size_t>(i)], cfg.groups, rng);
  }
  return next;
}

std::vector<Triplet> sample_edges(const std::vector<int>& membership, const SyntheticConfig& cfg, Rng& rng) {
  const auto members = members_of(membership, cfg.groups);
  const Index n = cfg.nodes;
  std::uniform_int_distribution<Index> any_node(0, n - 1);
  std::bernoulli_distribution intra(cfg.p);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(cfg.edges) * 2);
  std::vector<Triplet> edges;
  edges.reserve(static_cast<std::size_t>(cfg.edges));

  // The intra/inter decision is drawn once per edge; only the endpoints are
  // redrawn on collisions, so the intra-group share stays Binomial(m, p).
  const std::uint64_t budget = 200 * static_cast<std::uint64_t>(cfg.edges) + 100000;
  std::uint64_t attempts = 0;
  while (static_cast<Index>(edges.size()) < cfg.edges) {
    const bool inside = cfg.groups < 2 || intra(rng);
    for (;;) {
      if (++attempts > budget) {
        throw std::invalid_argument("could not place " + std::to_string(cfg.edges) +
                                    " distinct edges with the requested group structure");
      }
      const Index u = any_node(rng);
      const int gu = membership[static_cast<std::size_t>(u)];
      const int gv = inside ? gu : other_group(gu, cfg.groups, rng);
      const auto& pool = members[static_cast<std::size_t>(gv)];
      if (pool.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      const Index v = pool[pick(rng)];
      if (u == v) continue;
      const Index lo = std::min(u, v);
      const Index hi = std::max(u, v);
      const auto k = static_cast<std::uint64_t>(lo) * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(hi);
      if (!seen.insert(k).second) continue;
      edges.emplace_back(lo, hi, 1.0);
      break;
    }
  }
  return edges;
}

std::vector<Triplet> sample_content(const std::vector<int>& membership, const SyntheticConfig& cfg, Rng& rng) {
  std::bernoulli_distribution crossover(cfg.word_crossover);
  std::uniform_int_distribution<Index> word(0, cfg.words_per_group - 1);
  std::vector<Triplet> tokens;
  tokens.reserve(static_cast<std::size_t>(cfg.nodes * cfg.tokens_per_node));
  for (Index i = 0; i < cfg.nodes; ++i) {
    const int own = membership[static_cast<std::size_t>(i)];
    for (Index s = 0; s < cfg.tokens_per_node; ++s) {
      int block = own;
      if (cfg.groups > 1 && crossover(rng)) block = other_group(own, cfg.groups, rng);
      tokens.emplace_back(i, static_cast<Index>(block) * cfg.words_per_group + word(rng), 1.0);
    }
  }
  return tokens;  // duplicate coordinates are summed into counts
}

}  // namespace

void validate(const SyntheticConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid synthetic config: " + msg); };
  if (cfg.nodes < 2) fail("nodes must be at least 2");
  if (cfg.groups < 1) fail("groups must be at least 1");
  if (cfg.groups > cfg.nodes) fail("more groups than nodes");
  if (cfg.words_per_group < 0) fail("words_per_group must be non-negative");
  if (cfg.timestamps < 1) fail("timestamps must be at least 1");
  if (cfg.edges < 0) fail("edges must be non-negative");
  if (cfg.edges > cfg.nodes * (cfg.nodes - 1) / 2) {
    fail("edge count " + std::to_string(cfg.edges) + " exceeds n(n-1)/2 = " +
         std::to_string(cfg.nodes * (cfg.nodes - 1) / 2));
  }
  if (!(cfg.p > 0.0 && cfg.p <= 1.0)) fail("p must lie in (0, 1]");
  if (!(cfg.word_crossover >= 0.0 && cfg.word_crossover <= 1.0)) fail("word_crossover must lie in [0, 1]");
  if (!(cfg.transition_probability >= 0.0 && cfg.transition_probability <= 1.0)) {
    fail("transition_probability must lie in [0, 1]");
  }
  if (!(cfg.max_transition_fraction >= 0.0 && cfg.max_transition_fraction <= 1.0)) {
    fail("max_transition_fraction must lie in [0, 1]");
  }
  if (cfg.tokens_per_node < 0) fail("tokens_per_node must be non-negative");
  if (cfg.words_per_group == 0 && cfg.tokens_per_node > 0) fail("tokens need at least one word per group");
}

SyntheticDataset generate(const SyntheticConfig& cfg) {
  validate(cfg);
  auto rng = detail::make_rng(cfg.seed, detail::kSyntheticStream);
  std::vector<std::vector<int>> truth;
  truth.push_back(initial_groups(cfg.nodes, cfg.groups));
  for (Index t = 1; t < cfg.timestamps; ++t) truth.push_back(transition(truth.back(), cfg, rng));

  std::vector<std::vector<Triplet>> edges;
  std::vector<std::vector<Triplet>> content;
  for (Index t = 0; t < cfg.timestamps; ++t) {
    edges.push_back(sample_edges(truth[static_cast<std::size_t>(t)], cfg, rng));
    content.push_back(sample_content(truth[static_cast<std::size_t>(t)], cfg, rng));
  }
  const Index terms = static_cast<Index>(cfg.groups) * cfg.words_per_group;
  return SyntheticDataset{TemporalNetwork::from_triplets(cfg.nodes, terms, edges, content, false),
                          std::move(truth)};
}

}  // namespace chimera
