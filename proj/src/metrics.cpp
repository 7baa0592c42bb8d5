#include "chimera/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace chimera {
namespace {

void check_pair(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("predicted and truth lengths differ");
  auto negative = [](int x) { return x < 0; };
  if (std::any_of(predicted.begin(), predicted.end(), negative) ||
      std::any_of(truth.begin(), truth.end(), negative)) {
    throw std::invalid_argument("cluster and class ids must be non-negative");
  }
}

// Maps arbitrary non-negative ids onto 0..k-1 in order of first appearance.
std::vector<int> compress(std::span<const int> ids, int& count) {
  std::map<int, int> remap;
  std::vector<int> out(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, inserted] = remap.emplace(ids[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  count = static_cast<int>(remap.size());
  return out;
}

double pairs(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace

double purity(std::span<const int> predicted, std::span<const int> truth) {
  check_pair(predicted, truth);
  if (predicted.empty()) throw std::invalid_argument("purity of an empty clustering is undefined");
  int kp = 0;
  int kt = 0;
  const auto p = compress(predicted, kp);
  const auto c = compress(truth, kt);
  std::vector<std::size_t> table(static_cast<std::size_t>(kp) * static_cast<std::size_t>(kt), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    ++table[static_cast<std::size_t>(p[i]) * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c[i])];
  }
  std::size_t dominant = 0;
  for (int a = 0; a < kp; ++a) {
    const auto row = table.begin() + static_cast<std::ptrdiff_t>(a) * kt;
    dominant += *std::max_element(row, row + kt);
  }
  return static_cast<double>(dominant) / static_cast<double>(predicted.size());
}

double jaccard(std::span<const int> predicted, std::span<const int> truth) {
  check_pair(predicted, truth);
  if (predicted.size() < 2) throw std::invalid_argument("Jaccard index needs at least two items");
  int kp = 0;
  int kt = 0;
  const auto p = compress(predicted, kp);
  const auto c = compress(truth, kt);
  std::vector<double> table(static_cast<std::size_t>(kp) * static_cast<std::size_t>(kt), 0.0);
  std::vector<double> row_sum(static_cast<std::size_t>(kp), 0.0);
  std::vector<double> col_sum(static_cast<std::size_t>(kt), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    table[static_cast<std::size_t>(p[i]) * static_cast<std::size_t>(kt) + static_cast<std::size_t>(c[i])] += 1.0;
    row_sum[static_cast<std::size_t>(p[i])] += 1.0;
    col_sum[static_cast<std::size_t>(c[i])] += 1.0;
  }
  double both = 0.0;
  for (double v : table) both += pairs(v);
  double same_pred = 0.0;
  for (double v : row_sum) same_pred += pairs(v);
  double same_truth = 0.0;
  for (double v : col_sum) same_truth += pairs(v);
  const double either = same_pred + same_truth - both;
  if (either == 0.0) return 1.0;
  return both / either;
}

double silhouette(const Matrix& points, std::span<const int> labels) {
  const auto m = static_cast<std::size_t>(points.rows());
  if (labels.size() != m) throw std::invalid_argument("one label per point is required");
  if (m < 3) throw std::invalid_argument("silhouette needs at least three points");
  if (std::any_of(labels.begin(), labels.end(), [](int x) { return x < 0; })) {
    throw std::invalid_argument("cluster ids must be non-negative");
  }
  int k = 0;
  const auto lab = compress(labels, k);
  if (k < 2) throw std::invalid_argument("silhouette is undefined for a single cluster");

  std::vector<double> size(static_cast<std::size_t>(k), 0.0);
  for (int l : lab) size[static_cast<std::size_t>(l)] += 1.0;

  std::vector<double> sums(static_cast<std::size_t>(k));
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto own = static_cast<std::size_t>(lab[i]);
    if (size[own] <= 1.0) continue;  // singleton: s_i = 0
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      sums[static_cast<std::size_t>(lab[j])] +=
          (points.row(static_cast<Index>(i)) - points.row(static_cast<Index>(j))).norm();
    }
    const double a = sums[own] / (size[own] - 1.0);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (c != own) b = std::min(b, sums[c] / size[c]);
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(m);
}

}  // namespace chimera
