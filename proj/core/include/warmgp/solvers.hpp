#pragma once

#include <cstdint>
#include <vector>

#include "warmgp/types.hpp"

namespace warmgp {

enum class Method { CG, SGD, AP };

const char* method_name(Method m);
Method method_from_name(std::string_view name);

/// How the stochastic gradient rows are scaled in sgd_solve.
enum class SgdScaling {
  Unbiased,  // rows of (Hv - b) scaled by n/|B|: unbiased estimate of the gradient
  Block,     // unscaled rows: plain block-coordinate residual step
};

/// Which block an ap_solve iteration projects onto. Greedy picks the block
/// with the largest residual norm (ties to the lowest index), so a warm
/// start whose residual sits on the new points gets processed there first;
/// Cyclic walks the blocks in index order.
enum class ApOrdering { Greedy, Cyclic };

struct SolverConfig {
  Method method = Method::CG;
  double tolerance = 1e-2;
  int max_iters = 1000;
  // SGD
  double learning_rate = 0.3;
  double momentum = 0.9;
  Index batch_size = 100;
  SgdScaling sgd_scaling = SgdScaling::Unbiased;
  // AP
  Index block_size = 100;
  ApOrdering ap_ordering = ApOrdering::Greedy;
  // CG. The preconditioner is (L L^T + shift I)^{-1} with L the rank-limited
  // pivoted Cholesky factor. Calibrated mode adds the mean leftover diagonal
  // of H - L L^T to the shift, which clusters the unpreconditioned tail;
  // NoiseOnly keeps the bare noise-variance shift.
  enum class PrecondShiftMode { Calibrated, NoiseOnly };
  Index precond_rank = 100;
  double precond_shift = 1e-6;  // the noise-variance floor
  PrecondShiftMode precond_shift_mode = PrecondShiftMode::Calibrated;
  std::uint64_t seed = 0;
};

/// Where an iterative solve starts: all zeros, or the previous solution on
/// the old coordinates with zeros on the new ones.
struct Initialization {
  static Initialization cold() { return Initialization{}; }
  static Initialization warm(Vector u1_prev) {
    Initialization init;
    init.warm_start = true;
    init.u1 = std::move(u1_prev);
    return init;
  }

  bool warm_start = false;
  Vector u1;
};

/// Expands an initialization to a full-length start vector: cold gives the
/// zero vector, warm gives [u1; 0].
Vector init_weights(const Initialization& init, Index n1, Index n2);

/// |Hv - b| / |b|. Throws on a zero right-hand side.
double relative_residual(const Matrix& H, const Vector& v, const Vector& b);

/// 0.5 v^T H v - v^T b, the quadratic objective the solvers minimize.
double quadratic_objective(const Matrix& H, const Vector& v, const Vector& b);

/// Greedy diagonally pivoted partial Cholesky: returns an n x r factor L
/// (r <= rank) with L L^T ~ H and a nonnegative diagonal residual. Stops
/// early if no positive pivot remains.
Matrix pivoted_cholesky(const Matrix& H, Index rank);

/// Applies (L L^T + shift I)^{-1} through the Woodbury identity. rank 0
/// degrades to the identity preconditioner.
class CgPreconditioner {
 public:
  CgPreconditioner() = default;  // identity
  CgPreconditioner(Matrix low_rank_factor, double shift);

  /// Builds the factor with pivoted_cholesky(H, rank). In Calibrated mode the
  /// shift becomes `shift + trace(H - L L^T) / n`.
  static CgPreconditioner from_matrix(
      const Matrix& H, Index rank, double shift,
      SolverConfig::PrecondShiftMode mode = SolverConfig::PrecondShiftMode::Calibrated);

  Vector apply(const Vector& r) const;
  bool is_identity() const { return L_.cols() == 0; }

 private:
  Matrix L_;
  double shift_ = 1.0;
  Eigen::LLT<Matrix> capacitance_;  // shift I_k + L^T L
};

struct SolveResult {
  Vector v;
  int iterations = 0;
  std::vector<double> residual_history;  // entry 0 = initial residual
  bool converged = false;

  double final_residual() const { return residual_history.back(); }
};

/// Preconditioned conjugate gradients. Stops at tolerance (true residual,
/// recomputed every iteration) or at max_iters. Throws NotSpdError on
/// breakdown.
SolveResult cg_solve(const Matrix& H, const Vector& b, const Initialization& init,
                     const SolverConfig& cfg);

/// Same as cg_solve but reusing an externally built preconditioner.
SolveResult cg_solve_with(const Matrix& H, const Vector& b, const Initialization& init,
                          const SolverConfig& cfg, const CgPreconditioner& precond);

/// Stochastic gradient descent with momentum on the quadratic objective.
/// Each iteration samples a row batch of the residual. Throws
/// DivergenceError if the relative residual exceeds 1e3.
SolveResult sgd_solve(const Matrix& H, const Vector& b, const Initialization& init,
                      const SolverConfig& cfg);

/// Alternating projections: one iteration solves the block subsystem of the
/// cyclically next index block exactly against the current residual.
SolveResult ap_solve(const Matrix& H, const Vector& b, const Initialization& init,
                     const SolverConfig& cfg);

/// Dispatch on cfg.method.
SolveResult solve(const Matrix& H, const Vector& b, const Initialization& init,
                  const SolverConfig& cfg);

/// k independent solves sharing H (and, for CG, the preconditioner). SGD
/// seeds are derived per right-hand side; results match sequential
/// single-RHS calls exactly.
std::vector<SolveResult> solve_many(const Matrix& H, const Matrix& rhs_columns,
                                    const std::vector<Initialization>& inits,
                                    const SolverConfig& cfg);

}  // namespace warmgp
