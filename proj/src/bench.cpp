#include "chimera/bench.hpp"

#include "chimera/synthetic.hpp"

#include <stdexcept>

namespace chimera {

QuadraticFit fit_quadratic(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("x and y lengths differ");
  if (x.size() < 3) throw std::invalid_argument("a quadratic fit needs at least three points");
  const auto m = static_cast<Index>(x.size());
  Matrix design(m, 3);
  Eigen::VectorXd rhs(m);
  for (Index i = 0; i < m; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = xi;
    design(i, 2) = xi * xi;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < 3) throw std::invalid_argument("a quadratic fit needs three distinct x values");
  const Eigen::VectorXd c = qr.solve(rhs);
  QuadraticFit fit{c(0), c(1), c(2), 0.0};
  const double mean = rhs.mean();
  const double ss_tot = (rhs.array() - mean).square().sum();
  const double ss_res = (design * c - rhs).squaredNorm();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

BenchReport run_bench(const BenchOptions& options) {
  if (options.sizes.size() < 3) throw std::invalid_argument("bench needs at least three sizes");
  if (options.iterations < 1) throw std::invalid_argument("bench needs at least one iteration");
  BenchReport report;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const Index n : options.sizes) {
    SyntheticConfig cfg;
    cfg.nodes = n;
    cfg.edges = options.edges_per_node * n;
    cfg.timestamps = options.timestamps;
    cfg.seed = options.seed;
    const SyntheticDataset data = generate(cfg);

    Hyperparameters hp = options.hp;
    hp.max_iters = options.iterations;
    hp.tol = 0.0;
    hp.neg_sample_ratio = options.neg_sample_ratio;
    hp.seed = options.seed;
    const FitResult fitted = fit(data.network, hp);

    report.points.push_back({n, fitted.seconds, fitted.iterations, fitted.alpha_used});
    xs.push_back(static_cast<double>(n));
    ys.push_back(fitted.seconds);
  }
  report.fit = fit_quadratic(xs, ys);
  return report;
}

}  // namespace chimera
