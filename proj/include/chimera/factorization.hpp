#pragma once

#include "chimera/network.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace chimera {

/// How the temporal-smoothness term enters the gradient of U_t.
///
/// `exact` differentiates lambda2 * sum_t ||U_{t+1} - U_t||^2 fully, coupling U_t
/// to both neighbours. `paper_compat` keeps only the forward difference
/// 2 * lambda2 * (U_t - U_{t+1}), which is what the published update rule uses.
enum class GradientMode { exact, paper_compat };

const char* to_string(GradientMode mode);
GradientMode gradient_mode_from_string(const std::string& text);

struct Hyperparameters {
  double alpha = 0.01;      // step size
  double beta = 0.9;        // content weight
  double lambda1 = 1e-5;    // Frobenius regularizer on U_t, V, W
  double lambda2 = 1e-5;    // temporal smoothness
  Index rank = 10;
  int max_iters = 1000;
  double tol = 1e-8;        // relative objective change that counts as converged
  double neg_sample_ratio = 1.0;  // sampled zeros per nonzero of A_t; 0 means dense
  std::uint64_t seed = 0;
  GradientMode gradient_mode = GradientMode::exact;
  // Restarts from the same initialization with alpha / 2 when the run diverges
  // or (in exact mode) the objective increases.
  int max_halvings = 3;
  int threads = 1;
};

/// Throws std::invalid_argument on alpha <= 0, rank < 1, max_iters < 1 and
/// negative or non-finite weights.
void validate(const Hyperparameters& hp);

/// Per-timestamp embeddings U_t plus the global link factor V and term factor W.
struct FactorModel {
  std::vector<Matrix> U;  // T matrices, n x k
  Matrix V;               // n x k
  Matrix W;               // d x k

  Index rank() const noexcept { return V.cols(); }
  Index nodes() const noexcept { return V.rows(); }
  Index terms() const noexcept { return W.rows(); }
  Index timestamps() const noexcept { return static_cast<Index>(U.size()); }

  double min_entry() const;
  void check_shapes(const TemporalNetwork& network) const;
};

/// Entries i.i.d. uniform on the open interval (0, 1), fully determined by seed.
FactorModel initialize_model(Index nodes, Index terms, Index timestamps, Index rank,
                             std::uint64_t seed);

/// Coordinates of A_t that enter the structural loss.
///
/// In dense mode every one of the n^2 coordinates is active and `observed` is
/// simply A_t. Otherwise `observed` has one stored entry per active coordinate:
/// the nonzeros of A_t with their weights plus sampled zeros stored explicitly.
struct TimestampMask {
  bool dense = false;
  SparseMatrix observed;

  std::size_t size() const noexcept;
};

struct ActiveMask {
  std::vector<TimestampMask> timestamps;
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

/// All nonzeros of each A_t plus floor(ratio * nnz(A_t)) distinct zero
/// coordinates drawn uniformly (diagonal excluded for undirected networks).
/// ratio == 0 selects dense mode. Requests beyond the available zeros are clamped.
ActiveMask sample_active_mask(const TemporalNetwork& network, double ratio, std::uint64_t seed);

/// A_t - U_t V^T restricted to the mask. Dense masks keep a dense matrix, sparse
/// masks keep the residual on the mask pattern only.
struct LinkResidual {
  bool dense = false;
  Matrix full;
  SparseMatrix sparse;

  double squared_norm() const;
  Matrix times(const Matrix& rhs) const;            // residual * rhs
  Matrix transpose_times(const Matrix& rhs) const;  // residual^T * rhs
};

struct Residuals {
  std::vector<LinkResidual> link;  // Delta^A_t
  std::vector<Matrix> content;     // Delta^C_t, dense n x d
  std::vector<Matrix> temporal;    // Delta^U_t = U_t - U_{t+1}; zero at the last timestamp
};

struct ObjectiveTerms {
  double structural = 0.0;
  double content = 0.0;     // already multiplied by beta
  double norm = 0.0;        // already multiplied by lambda1
  double smoothness = 0.0;  // already multiplied by lambda2

  double total() const noexcept { return structural + content + norm + smoothness; }
};

struct Gradients {
  std::vector<Matrix> U;
  Matrix V;
  Matrix W;
};

/// Raised when the objective stops being finite. `iteration` is -1 when the
/// failure happened outside a fitting loop.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int iteration, double last_finite_objective, double alpha);

  int iteration() const noexcept { return iteration_; }
  double last_finite_objective() const noexcept { return last_finite_; }
  double alpha() const noexcept { return alpha_; }

 private:
  int iteration_;
  double last_finite_;
  double alpha_;
};

Residuals compute_residuals(const TemporalNetwork& network, const FactorModel& model,
                            const ActiveMask& mask, int threads = 1);

/// Objective from residuals that are fresh for `model`.
ObjectiveTerms objective_terms(const Residuals& residuals, const FactorModel& model,
                               const Hyperparameters& hp);

/// Structural loss over the mask, beta-weighted content loss, lambda1 norms and
/// lambda2 temporal smoothness. Throws DivergenceError if the result is not finite.
double evaluate_objective(const TemporalNetwork& network, const FactorModel& model,
                          const Hyperparameters& hp, const ActiveMask& mask);

Gradients compute_gradients(const TemporalNetwork& network, const FactorModel& model,
                            const Hyperparameters& hp, const Residuals& residuals,
                            int threads = 1);

/// X <- max(0, X - alpha * dJ/dX) for every factor, all from the pre-step values.
FactorModel gradient_step(const FactorModel& model, const Gradients& gradients, double alpha);
void apply_gradient_step(FactorModel& model, const Gradients& gradients, double alpha);

struct FitResult {
  FactorModel model;
  std::vector<double> trace;  // objective before the first update and after each update
  int iterations = 0;         // updates applied
  bool converged = false;     // stopped on the tolerance rule
  double alpha_used = 0.0;
  int halvings = 0;
  double final_objective = 0.0;
  double seconds = 0.0;       // wall time of the accepted run
  ActiveMask mask;
};

FitResult fit(const TemporalNetwork& network, const Hyperparameters& hp);

/// Fits from an explicit initialization and mask; the seed in hp is ignored.
FitResult fit_from(const TemporalNetwork& network, const Hyperparameters& hp,
                   const FactorModel& initial, const ActiveMask& mask);

}  // namespace chimera
