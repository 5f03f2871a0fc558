#pragma once

#include <cstdint>
#include <vector>

#include "warmgp/kernel.hpp"
#include "warmgp/rng.hpp"
#include "warmgp/sampling.hpp"
#include "warmgp/solvers.hpp"

namespace warmgp {

enum class InitMode { Warm, Cold };

const char* init_mode_name(InitMode mode);
InitMode init_mode_from_name(std::string_view name);

/// Per-solver iteration caps for a fixed compute budget.
struct BoBudget {
  int cg_iters = 5;
  int sgd_iters = 120;
  int ap_iters = 30;

  static BoBudget small() { return BoBudget{5, 120, 30}; }
  static BoBudget large() { return BoBudget{25, 600, 150}; }
  int iters_for(Method m) const;
};

struct BoConfig {
  Index input_dim = 3;
  Index n_init = 500;
  Index batch_size = 10;   // acquisitions per round (one per posterior sample)
  Index n_samples = 10;    // posterior samples drawn each round
  int n_rounds = 10;
  double lengthscale = 0.3;
  double signal_scale = 1.0;
  double noise_scale = 1e-3;
  Index num_features = 2000;
  Method solver = Method::CG;
  BoBudget budget{};
  InitMode init_mode = InitMode::Warm;
  double tolerance = 1e-2;

  // Candidate proposal and ascent of the posterior-sample maximizers.
  Index proposal_count = 250;
  int proposal_rounds = 5;
  double exploration_fraction = 0.1;
  double anchor_temperature_scale = 1.0;  // softmax temperature = scale * std(y)
  int ascent_steps = 30;
  double ascent_rate = 0.05;

  // Solver sub-parameters forwarded to SolverConfig.
  double sgd_learning_rate = 0.3;
  double sgd_momentum = 0.9;
  Index sgd_batch = 100;
  Index ap_block = 100;
  Index cg_rank = 100;

  std::uint64_t seed = 0;

  KernelHyperparams hyp() const { return {lengthscale, signal_scale, noise_scale}; }
  SolverConfig solver_config() const;

  void validate() const;
};

/// The synthetic optimisation target: a fixed draw from the GP prior,
/// observed with Gaussian noise.
class Objective {
 public:
  Objective() = default;
  Objective(RffPrior g, double noise_scale, std::uint64_t noise_seed)
      : g_(std::move(g)), noise_scale_(noise_scale), rng_(noise_seed) {}

  /// Noiseless function value.
  double value(const Vector& x) const;
  /// Noisy observation; advances the internal noise stream.
  double observe(const Vector& x);

  Index dim() const { return g_.dim(); }

 private:
  RffPrior g_;
  double noise_scale_ = 0.0;
  Rng rng_{0};
};

Objective make_objective(Index dim, const KernelHyperparams& hyp, std::uint64_t seed);

/// Low-discrepancy (rotated Halton) design covering [0,1]^dim.
Matrix init_design(Index dim, Index n, std::uint64_t seed);

/// One round's scalar outcomes.
struct TrialRecord {
  int round = 0;
  double best_value = 0.0;
  double mean_residual = 0.0;        // final relative residual of the mean solve
  double avg_sample_residual = 0.0;  // averaged over the sample solves
  double wall_clock_s = 0.0;
  int mean_iterations = 0;
  int max_sample_iterations = 0;
};

/// Mutable state carried across acquisition rounds. Weights cover the first
/// n_solved observations; points acquired in the latest round are appended
/// to X_obs/y_obs and folded into the systems at the start of the next
/// round.
struct BoState {
  Matrix X_obs;            // n x D
  Vector y_obs;            // n
  Vector mean_weights;     // n_solved
  Matrix sample_weights;   // n_solved x n_samples
  std::vector<RffPrior> priors;
  Matrix prior_values;     // n x n_samples, f_s evaluated at each observation
  Matrix noise_draws;      // n x n_samples, per-point per-sample noise
  CovarianceMatrix cov;    // covariance of the first n_solved rows
  Objective objective;
  Rng noise_rng{0};
  Index n_solved = 0;
  int round = 0;

  Index n_obs() const { return X_obs.rows(); }
};

/// Builds the objective, evaluates the initial design, and draws the
/// posterior-sample priors and their per-point noise.
BoState bo_init(const BoConfig& cfg);

/// Candidate proposals: an exploration fraction drawn uniformly, the rest
/// Gaussian perturbations (std lengthscale/2) of observed anchors chosen with
/// a softmax preference for high targets. All rows clamped to [0,1]^D.
Matrix propose_candidates(const BoState& state, Index count, double lengthscale,
                          double exploration_fraction, double temperature_scale,
                          std::uint64_t seed);

/// For each repetition, proposes `per_round` shared candidates and records
/// every sample's argmax location. Returns one rounds x D matrix per sample.
std::vector<Matrix> select_peaks(const std::vector<PosteriorSample>& samples,
                                 const BoState& state, int rounds, Index per_round,
                                 const BoConfig& cfg, std::uint64_t seed);

struct AscendResult {
  Matrix points;  // n_samples x D, best point per sample
  Vector values;  // posterior value at those points
};

/// Adam ascent of each recorded peak on its posterior sample, iterates
/// clamped to the unit cube, best-seen iterate kept.
AscendResult ascend_peaks(const std::vector<PosteriorSample>& samples,
                          const std::vector<Matrix>& peaks, int steps, double rate,
                          std::uint64_t seed);

/// One acquisition round: fold pending observations into the systems, run
/// the budgeted solves (warm or cold), rebuild the posterior samples,
/// acquire and evaluate a new batch. Solver divergence is recorded and the
/// round continues with the initialization weights.
TrialRecord bo_round(BoState& state, const BoConfig& cfg);

/// Full run: the round-0 record covers the initial design only.
std::vector<TrialRecord> run_bo(const BoConfig& cfg);

}  // namespace warmgp
