#include "chimera/factorization.hpp"

#include "detail.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace chimera {
namespace {

constexpr double kRelativeEpsilon = 1e-12;

bool finite_nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

// Index of (i, j) in row-major order; n <= 2^31 keeps this inside 64 bits.
std::uint64_t key(Index i, Index j, Index n) {
  return static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(j);
}

bool has_entry(const SparseMatrix& a, Index i, Index j) {
  const auto* begin = a.innerIndexPtr() + a.outerIndexPtr()[i];
  const auto* end = a.innerIndexPtr() + a.outerIndexPtr()[i + 1];
  return std::binary_search(begin, end, static_cast<SparseMatrix::StorageIndex>(j));
}

TimestampMask sample_timestamp(const SparseMatrix& a, bool directed, double ratio,
                               std::mt19937_64& rng) {
  TimestampMask mask;
  if (ratio == 0.0) {
    mask.dense = true;
    mask.observed = a;
    return mask;
  }
  const Index n = a.rows();
  const auto nnz = static_cast<std::uint64_t>(a.nonZeros());
  std::uint64_t diagonal_nnz = 0;
  for (Index i = 0; i < n; ++i) diagonal_nnz += has_entry(a, i, i) ? 1 : 0;
  const auto total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  const std::uint64_t available =
      directed ? total - nnz : (total - static_cast<std::uint64_t>(n)) - (nnz - diagonal_nnz);
  const auto requested = static_cast<std::uint64_t>(std::floor(ratio * static_cast<double>(nnz)));
  const std::uint64_t want = std::min(requested, available);

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(nnz + want));
  for (Index r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
  }

  auto usable_zero = [&](Index i, Index j) {
    if (!directed && i == j) return false;
    return !has_entry(a, i, j);
  };

  if (want > 0 && want * 2 <= available) {
    std::uniform_int_distribution<Index> pick(0, n - 1);
    std::unordered_set<std::uint64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(want) * 2);
    while (chosen.size() < want) {
      const Index i = pick(rng);
      const Index j = pick(rng);
      if (!usable_zero(i, j)) continue;
      if (chosen.insert(key(i, j, n)).second) entries.emplace_back(i, j, 0.0);
    }
  } else if (want > 0) {
    std::vector<std::uint64_t> zeros;
    zeros.reserve(static_cast<std::size_t>(available));
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (usable_zero(i, j)) zeros.push_back(key(i, j, n));
      }
    }
    for (std::uint64_t s = 0; s < want; ++s) {
      std::uniform_int_distribution<std::uint64_t> pick(s, zeros.size() - 1);
      std::swap(zeros[s], zeros[pick(rng)]);
      const auto k = zeros[s];
      entries.emplace_back(static_cast<Index>(k / static_cast<std::uint64_t>(n)),
                           static_cast<Index>(k % static_cast<std::uint64_t>(n)), 0.0);
    }
  }

  mask.observed.resize(n, n);
  mask.observed.setFromTriplets(entries.begin(), entries.end());
  mask.observed.makeCompressed();
  return mask;
}

}  // namespace

const char* to_string(GradientMode mode) {
  return mode == GradientMode::exact ? "exact" : "paper-compat";
}

GradientMode gradient_mode_from_string(const std::string& text) {
  if (text == "exact") return GradientMode::exact;
  if (text == "paper-compat" || text == "paper_compat") return GradientMode::paper_compat;
  throw std::invalid_argument("unknown gradient mode '" + text + "' (expected exact or paper-compat)");
}

void validate(const Hyperparameters& hp) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid hyperparameters: " + msg); };
  if (!(std::isfinite(hp.alpha) && hp.alpha > 0.0)) fail("alpha must be positive");
  if (!finite_nonnegative(hp.beta)) fail("beta must be non-negative");
  if (!finite_nonnegative(hp.lambda1)) fail("lambda1 must be non-negative");
  if (!finite_nonnegative(hp.lambda2)) fail("lambda2 must be non-negative");
  if (hp.rank < 1) fail("rank must be at least 1");
  if (hp.max_iters < 1) fail("max_iters must be at least 1");
  if (!finite_nonnegative(hp.tol)) fail("tol must be non-negative");
  if (!finite_nonnegative(hp.neg_sample_ratio)) fail("neg_sample_ratio must be non-negative");
  if (hp.max_halvings < 0) fail("max_halvings must be non-negative");
  if (hp.threads < 1) fail("threads must be at least 1");
}

double FactorModel::min_entry() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& u : U) {
    if (u.size() > 0) m = std::min(m, u.minCoeff());
  }
  if (V.size() > 0) m = std::min(m, V.minCoeff());
  if (W.size() > 0) m = std::min(m, W.minCoeff());
  return m;
}

void FactorModel::check_shapes(const TemporalNetwork& network) const {
  std::ostringstream msg;
  if (timestamps() != network.timestamps()) {
    msg << "model has " << timestamps() << " timestamps, network has " << network.timestamps();
  } else if (V.rows() != network.nodes()) {
    msg << "V has " << V.rows() << " rows, network has " << network.nodes() << " nodes";
  } else if (W.rows() != network.terms() || W.cols() != rank()) {
    msg << "W is " << W.rows() << "x" << W.cols() << ", expected " << network.terms() << "x" << rank();
  } else {
    for (const auto& u : U) {
      if (u.rows() != V.rows() || u.cols() != V.cols()) {
        msg << "U_t is " << u.rows() << "x" << u.cols() << ", expected " << V.rows() << "x" << V.cols();
        break;
      }
    }
  }
  if (!msg.str().empty()) throw std::invalid_argument("shape mismatch: " + msg.str());
}

FactorModel initialize_model(Index nodes, Index terms, Index timestamps, Index rank,
                             std::uint64_t seed) {
  auto rng = detail::make_rng(seed, detail::kInitStream);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto fill = [&](Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) {
        double x = 0.0;
        while (x == 0.0) x = unit(rng);
        m(i, j) = x;
      }
    }
    return m;
  };
  FactorModel model;
  for (Index t = 0; t < timestamps; ++t) model.U.push_back(fill(nodes, rank));
  model.V = fill(nodes, rank);
  model.W = fill(terms, rank);
  return model;
}

std::size_t TimestampMask::size() const noexcept {
  if (dense) return static_cast<std::size_t>(observed.rows() * observed.cols());
  return static_cast<std::size_t>(observed.nonZeros());
}

ActiveMask sample_active_mask(const TemporalNetwork& network, double ratio, std::uint64_t seed) {
  if (!finite_nonnegative(ratio)) throw std::invalid_argument("sampling ratio must be non-negative");
  auto rng = detail::make_rng(seed, detail::kMaskStream);
  ActiveMask mask;
  mask.ratio = ratio;
  mask.seed = seed;
  for (Index t = 0; t < network.timestamps(); ++t) {
    mask.timestamps.push_back(sample_timestamp(network.adjacency(t), network.directed(), ratio, rng));
  }
  return mask;
}

double LinkResidual::squared_norm() const {
  if (dense) return full.squaredNorm();
  double s = 0.0;
  const double* v = sparse.valuePtr();
  for (Index e = 0; e < sparse.nonZeros(); ++e) s += v[e] * v[e];
  return s;
}

Matrix LinkResidual::times(const Matrix& rhs) const {
  if (dense) return full * rhs;
  return sparse * rhs;
}

Matrix LinkResidual::transpose_times(const Matrix& rhs) const {
  if (dense) return full.transpose() * rhs;
  return sparse.transpose() * rhs;
}

Residuals compute_residuals(const TemporalNetwork& network, const FactorModel& model,
                            const ActiveMask& mask, int threads) {
  model.check_shapes(network);
  const Index T = network.timestamps();
  if (static_cast<Index>(mask.timestamps.size()) != T) {
    throw std::invalid_argument("mask timestamp count does not match the network");
  }
  Residuals r;
  r.link.resize(static_cast<std::size_t>(T));
  r.content.resize(static_cast<std::size_t>(T));
  r.temporal.resize(static_cast<std::size_t>(T));

  detail::parallel_for(static_cast<int>(T), threads, [&](int ti) {
    const auto t = static_cast<std::size_t>(ti);
    const Matrix& u = model.U[t];
    const TimestampMask& m = mask.timestamps[t];
    LinkResidual& link = r.link[t];
    link.dense = m.dense;
    if (m.dense) {
      link.full.noalias() = -u * model.V.transpose();
      const SparseMatrix& a = network.adjacency(ti);
      for (Index row = 0; row < a.outerSize(); ++row) {
        for (SparseMatrix::InnerIterator it(a, row); it; ++it) link.full(it.row(), it.col()) += it.value();
      }
    } else {
      link.sparse = m.observed;
      for (Index row = 0; row < link.sparse.outerSize(); ++row) {
        for (SparseMatrix::InnerIterator it(link.sparse, row); it; ++it) {
          it.valueRef() -= u.row(row).dot(model.V.row(it.col()));
        }
      }
    }
    r.content[t] = Matrix(network.content(ti)) - u * model.W.transpose();
    if (ti + 1 < T) {
      r.temporal[t] = u - model.U[t + 1];
    } else {
      r.temporal[t] = Matrix::Zero(u.rows(), u.cols());
    }
  });
  return r;
}

ObjectiveTerms objective_terms(const Residuals& residuals, const FactorModel& model,
                               const Hyperparameters& hp) {
  ObjectiveTerms terms;
  double content = 0.0;
  double norms = model.V.squaredNorm() + model.W.squaredNorm();
  double smooth = 0.0;
  for (std::size_t t = 0; t < residuals.link.size(); ++t) {
    terms.structural += residuals.link[t].squared_norm();
    content += residuals.content[t].squaredNorm();
    norms += model.U[t].squaredNorm();
    smooth += residuals.temporal[t].squaredNorm();
  }
  terms.content = hp.beta * content;
  terms.norm = hp.lambda1 * norms;
  terms.smoothness = hp.lambda2 * smooth;
  return terms;
}

double evaluate_objective(const TemporalNetwork& network, const FactorModel& model,
                          const Hyperparameters& hp, const ActiveMask& mask) {
  const double j = objective_terms(compute_residuals(network, model, mask), model, hp).total();
  if (!std::isfinite(j)) throw DivergenceError(-1, std::numeric_limits<double>::quiet_NaN(), hp.alpha);
  return j;
}

Gradients compute_gradients(const TemporalNetwork& network, const FactorModel& model,
                            const Hyperparameters& hp, const Residuals& residuals, int threads) {
  model.check_shapes(network);
  const auto T = static_cast<std::size_t>(network.timestamps());
  Gradients g;
  g.U.resize(T);
  std::vector<Matrix> v_parts(T);
  std::vector<Matrix> w_parts(T);

  detail::parallel_for(static_cast<int>(T), threads, [&](int ti) {
    const auto t = static_cast<std::size_t>(ti);
    const Matrix& u = model.U[t];
    Matrix grad = 2.0 * hp.lambda1 * u;
    grad.noalias() -= 2.0 * residuals.link[t].times(model.V);
    grad.noalias() -= (2.0 * hp.beta) * (residuals.content[t] * model.W);
    if (hp.lambda2 != 0.0) {
      grad += 2.0 * hp.lambda2 * residuals.temporal[t];
      if (hp.gradient_mode == GradientMode::exact && t > 0) {
        grad -= 2.0 * hp.lambda2 * residuals.temporal[t - 1];
      }
    }
    g.U[t] = std::move(grad);
    v_parts[t] = residuals.link[t].transpose_times(u);
    w_parts[t] = residuals.content[t].transpose() * u;
  });

  g.V = 2.0 * hp.lambda1 * model.V;
  g.W = 2.0 * hp.lambda1 * model.W;
  for (std::size_t t = 0; t < T; ++t) {
    g.V -= 2.0 * v_parts[t];
    g.W -= (2.0 * hp.beta) * w_parts[t];
  }
  return g;
}

void apply_gradient_step(FactorModel& model, const Gradients& gradients, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("step size must be positive");
  auto step = [alpha](Matrix& x, const Matrix& g) { x = (x - alpha * g).cwiseMax(0.0); };
  for (std::size_t t = 0; t < model.U.size(); ++t) step(model.U[t], gradients.U[t]);
  step(model.V, gradients.V);
  step(model.W, gradients.W);
}

FactorModel gradient_step(const FactorModel& model, const Gradients& gradients, double alpha) {
  FactorModel next = model;
  apply_gradient_step(next, gradients, alpha);
  return next;
}

DivergenceError::DivergenceError(int iteration, double last_finite_objective, double alpha)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "objective became non-finite";
        if (iteration >= 0) msg << " at iteration " << iteration;
        msg << " (alpha " << alpha;
        if (std::isfinite(last_finite_objective)) msg << ", last finite objective " << last_finite_objective;
        msg << ")";
        return msg.str();
      }()),
      iteration_(iteration),
      last_finite_(last_finite_objective),
      alpha_(alpha) {}

namespace {

enum class RunOutcome { ok, diverged, increased };

struct Run {
  RunOutcome outcome = RunOutcome::ok;
  FitResult result;
  int failed_iteration = 0;
  double last_finite = std::numeric_limits<double>::quiet_NaN();
};

Run run_descent(const TemporalNetwork& network, const Hyperparameters& hp, const FactorModel& initial,
                const ActiveMask& mask, double alpha, bool stop_on_increase) {
  const auto start = std::chrono::steady_clock::now();
  Run run;
  FitResult& out = run.result;
  out.model = initial;
  out.alpha_used = alpha;

  Residuals residuals = compute_residuals(network, out.model, mask, hp.threads);
  double j = objective_terms(residuals, out.model, hp).total();
  if (!std::isfinite(j)) {
    run.outcome = RunOutcome::diverged;
    return run;
  }
  out.trace.push_back(j);
  run.last_finite = j;

  for (int it = 1; it <= hp.max_iters; ++it) {
    const Gradients g = compute_gradients(network, out.model, hp, residuals, hp.threads);
    apply_gradient_step(out.model, g, alpha);
    out.iterations = it;
    residuals = compute_residuals(network, out.model, mask, hp.threads);
    const double next = objective_terms(residuals, out.model, hp).total();
    if (!std::isfinite(next)) {
      run.outcome = RunOutcome::diverged;
      run.failed_iteration = it;
      return run;
    }
    if (stop_on_increase && next > j * (1.0 + kRelativeEpsilon)) {
      run.outcome = RunOutcome::increased;
      run.failed_iteration = it;
      return run;
    }
    out.trace.push_back(next);
    run.last_finite = next;
    const double change = std::abs(j - next) / std::max(j, kRelativeEpsilon);
    j = next;
    if (change < hp.tol) {
      out.converged = true;
      break;
    }
  }
  out.final_objective = j;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

}  // namespace

FitResult fit_from(const TemporalNetwork& network, const Hyperparameters& hp,
                   const FactorModel& initial, const ActiveMask& mask) {
  validate(hp);
  initial.check_shapes(network);
  if (initial.rank() != hp.rank) throw std::invalid_argument("initial model rank differs from hp.rank");

  double alpha = hp.alpha;
  for (int halving = 0;; ++halving) {
    const bool can_retry = halving < hp.max_halvings;
    const bool watch_increase = can_retry && hp.gradient_mode == GradientMode::exact;
    Run run = run_descent(network, hp, initial, mask, alpha, watch_increase);
    if (run.outcome == RunOutcome::ok) {
      run.result.halvings = halving;
      run.result.mask = mask;
      return std::move(run.result);
    }
    if (!can_retry) throw DivergenceError(run.failed_iteration, run.last_finite, alpha);
    alpha /= 2.0;
  }
}

FitResult fit(const TemporalNetwork& network, const Hyperparameters& hp) {
  validate(hp);
  const FactorModel initial =
      initialize_model(network.nodes(), network.terms(), network.timestamps(), hp.rank, hp.seed);
  return fit_from(network, hp, initial, sample_active_mask(network, hp.neg_sample_ratio, hp.seed));
}

}  // namespace chimera
