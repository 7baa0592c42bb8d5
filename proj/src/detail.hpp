#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace chimera::detail {

// Independent, reproducible generator for a named purpose derived from a user seed.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

enum Stream : std::uint64_t {
  kInitStream = 0x1a17,
  kMaskStream = 0x3a5c,
  kKMeansStream = 0x4b3a,
  kSyntheticStream = 0x5e7d,
  kTunerStream = 0x7e4e,
};

// Runs body(i) for i in [0, count). Each index is handled by exactly one worker,
// so results written per index do not depend on the thread count.
inline void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  const int workers = std::min(threads, count);
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) body(i);
    });
  }
}

}  // namespace chimera::detail
