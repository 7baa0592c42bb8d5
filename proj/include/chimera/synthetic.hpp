#pragma once

#include "chimera/network.hpp"

#include <cstdint>
#include <vector>

namespace chimera {

/// Planted-community generator settings. Defaults reproduce the first
/// synthetic benchmark: 5,000 nodes, 20,000 edges, five groups of five words,
/// three snapshots, intra-group edge probability 0.75.
struct SyntheticConfig {
  Index nodes = 5000;
  Index edges = 20000;  // undirected edges per snapshot
  int groups = 5;
  Index words_per_group = 5;
  Index timestamps = 3;
  double p = 0.75;                      // probability that an edge stays inside a group
  double word_crossover = 0.1;          // probability that a token lands in another group's block
  double transition_probability = 0.05;  // per node, per step
  double max_transition_fraction = 0.1;  // cap on movers per step as a fraction of n
  Index tokens_per_node = 20;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument for out-of-range settings, including an edge
/// count larger than n(n-1)/2.
void validate(const SyntheticConfig& config);

struct SyntheticDataset {
  TemporalNetwork network;
  std::vector<std::vector<int>> truth;  // truth[t][node] = group id
};

SyntheticDataset generate(const SyntheticConfig& config);

}  // namespace chimera
