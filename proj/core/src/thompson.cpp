#include "warmgp/thompson.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace warmgp {

const char* init_mode_name(InitMode mode) {
  return mode == InitMode::Warm ? "warm" : "cold";
}

InitMode init_mode_from_name(std::string_view name) {
  if (name == "warm") return InitMode::Warm;
  if (name == "cold") return InitMode::Cold;
  throw std::invalid_argument("unknown init mode '" + std::string(name) + "'");
}

int BoBudget::iters_for(Method m) const {
  switch (m) {
    case Method::CG: return cg_iters;
    case Method::SGD: return sgd_iters;
    case Method::AP: return ap_iters;
  }
  return 0;
}

SolverConfig BoConfig::solver_config() const {
  SolverConfig s;
  s.method = solver;
  s.tolerance = tolerance;
  s.max_iters = budget.iters_for(solver);
  s.learning_rate = sgd_learning_rate;
  s.momentum = sgd_momentum;
  s.batch_size = sgd_batch;
  s.block_size = ap_block;
  s.precond_rank = cg_rank;
  s.precond_shift = noise_scale * noise_scale;
  return s;
}

void BoConfig::validate() const {
  if (input_dim < 1 || n_init < 1 || n_samples < 1 || batch_size < 1 || n_rounds < 0) {
    throw std::invalid_argument("BoConfig: counts must be positive");
  }
  if (batch_size > n_samples) {
    throw std::invalid_argument("BoConfig: batch_size cannot exceed n_samples "
                                "(one acquisition per posterior sample)");
  }
  hyp().validate();
}

double Objective::value(const Vector& x) const {
  Matrix row(1, x.size());
  row.row(0) = x.transpose();
  return eval_prior(g_, row)(0);
}

double Objective::observe(const Vector& x) {
  return value(x) + noise_scale_ * rng_.normal();
}

Objective make_objective(Index dim, const KernelHyperparams& hyp, std::uint64_t seed) {
  RffPrior g = sample_prior(hyp, dim, 2000, derive_seed(seed, 0x0b1ec7));
  return Objective(std::move(g), hyp.noise_scale, derive_seed(seed, 0x0b5e7e));
}

namespace {

Index nth_prime(Index k) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                               43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101,
                               103, 107, 109, 113, 127, 131, 137, 139, 149, 151};
  if (k < static_cast<Index>(sizeof(primes) / sizeof(primes[0]))) return primes[k];
  // Beyond the table, search upward (designs this wide are unusual).
  Index candidate = primes[sizeof(primes) / sizeof(primes[0]) - 1];
  Index found = static_cast<Index>(sizeof(primes) / sizeof(primes[0])) - 1;
  while (found < k) {
    ++candidate;
    bool is_prime = true;
    for (Index p = 2; p * p <= candidate; ++p) {
      if (candidate % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) ++found;
  }
  return candidate;
}

double radical_inverse(std::uint64_t i, Index base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double x = 0.0;
  while (i > 0) {
    x += static_cast<double>(i % static_cast<std::uint64_t>(base)) * f;
    i /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return x;
}

}  // namespace

Matrix init_design(Index dim, Index n, std::uint64_t seed) {
  if (dim < 1 || n < 1) throw std::invalid_argument("init_design: dim and n must be positive");
  Rng rng(derive_seed(seed, 0xde5160));
  Vector shift(dim);
  for (Index d = 0; d < dim; ++d) shift(d) = rng.uniform();

  Matrix X(n, dim);
  for (Index d = 0; d < dim; ++d) {
    const Index base = nth_prime(d);
    for (Index i = 0; i < n; ++i) {
      // Skip index 0 so the unrotated sequence avoids the origin; the seeded
      // rotation then decorrelates runs without losing uniformity.
      double v = radical_inverse(static_cast<std::uint64_t>(i) + 1, base) + shift(d);
      v -= std::floor(v);
      X(i, d) = v;
    }
  }
  return X;
}

Matrix propose_candidates(const BoState& state, Index count, double lengthscale,
                          double exploration_fraction, double temperature_scale,
                          std::uint64_t seed) {
  if (state.n_obs() < 1) throw std::invalid_argument("propose_candidates: no observations");
  if (count < 1) throw std::invalid_argument("propose_candidates: count must be positive");
  const Index dim = state.X_obs.cols();
  const Index n_uniform =
      std::min<Index>(count, static_cast<Index>(std::ceil(exploration_fraction *
                                                          static_cast<double>(count))));

  Rng rng(seed);
  Matrix cands(count, dim);
  for (Index i = 0; i < n_uniform; ++i) {
    for (Index d = 0; d < dim; ++d) cands(i, d) = rng.uniform();
  }

  if (n_uniform < count) {
    // Anchor distribution: softmax(y / T) with T proportional to std(y).
    const Index n = state.n_obs();
    const double mean = state.y_obs.mean();
    const double sd =
        std::sqrt((state.y_obs.array() - mean).square().sum() / static_cast<double>(n));
    const double temperature = temperature_scale * sd;

    Vector cumulative(n);
    if (!(temperature > 0.0)) {
      // Degenerate temperature: all mass on the argmax.
      Index best = 0;
      state.y_obs.maxCoeff(&best);
      cumulative.setZero();
      cumulative.tail(n - best).setConstant(1.0);
    } else {
      const double ymax = state.y_obs.maxCoeff();
      double total = 0.0;
      for (Index i = 0; i < n; ++i) {
        total += std::exp((state.y_obs(i) - ymax) / temperature);
        cumulative(i) = total;
      }
      cumulative /= total;
    }

    const double perturb_sd = 0.5 * lengthscale;
    for (Index i = n_uniform; i < count; ++i) {
      const double u = rng.uniform();
      Index lo = 0, hi = state.n_obs() - 1;
      while (lo < hi) {
        const Index mid = (lo + hi) / 2;
        if (cumulative(mid) < u) {
          lo = mid + 1;
        } else {
          hi = mid;
        }
      }
      for (Index d = 0; d < dim; ++d) {
        const double v = state.X_obs(lo, d) + perturb_sd * rng.normal();
        cands(i, d) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return cands;
}

std::vector<Matrix> select_peaks(const std::vector<PosteriorSample>& samples,
                                 const BoState& state, int rounds, Index per_round,
                                 const BoConfig& cfg, std::uint64_t seed) {
  const std::size_t n_samples = samples.size();
  const Index dim = state.X_obs.cols();
  std::vector<Matrix> peaks(n_samples, Matrix(rounds, dim));

  for (int rep = 0; rep < rounds; ++rep) {
    const Matrix cands =
        propose_candidates(state, per_round, cfg.lengthscale, cfg.exploration_fraction,
                           cfg.anchor_temperature_scale, derive_seed(seed, rep));
    for (std::size_t s = 0; s < n_samples; ++s) {
      const Vector vals = eval_posterior(samples[s], cands);
      Index best = 0;
      vals.maxCoeff(&best);
      peaks[s].row(rep) = cands.row(best);
    }
  }
  return peaks;
}

AscendResult ascend_peaks(const std::vector<PosteriorSample>& samples,
                          const std::vector<Matrix>& peaks, int steps, double rate,
                          std::uint64_t /*seed*/) {
  if (samples.size() != peaks.size()) {
    throw std::invalid_argument("ascend_peaks: one peak set per posterior sample required");
  }
  const std::size_t n_samples = samples.size();
  const Index dim = peaks.empty() ? 0 : peaks.front().cols();

  AscendResult out;
  out.points.resize(static_cast<Index>(n_samples), dim);
  out.values.resize(static_cast<Index>(n_samples));

  Matrix probe(1, dim);
  for (std::size_t s = 0; s < n_samples; ++s) {
    double best_val = -std::numeric_limits<double>::infinity();
    Vector best_x = Vector::Zero(dim);

    for (Index t = 0; t < peaks[s].rows(); ++t) {
      Vector x = peaks[s].row(t).transpose();
      Vector m = Vector::Zero(dim), v = Vector::Zero(dim);
      probe.row(0) = x.transpose();
      double val = eval_posterior(samples[s], probe)(0);
      if (val > best_val) {
        best_val = val;
        best_x = x;
      }
      for (int k = 1; k <= steps; ++k) {
        const Vector g = grad_posterior(samples[s], x);
        if (!g.allFinite()) break;  // freeze this trajectory, keep best-seen
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g.cwiseProduct(g).eval();
        const double bc1 = 1.0 - std::pow(0.9, k);
        const double bc2 = 1.0 - std::pow(0.999, k);
        const Vector step = (m / bc1).cwiseQuotient(((v / bc2).cwiseSqrt().array() + 1e-8).matrix());
        x += rate * step;  // ascent
        x = x.cwiseMax(0.0).cwiseMin(1.0);
        probe.row(0) = x.transpose();
        val = eval_posterior(samples[s], probe)(0);
        if (val > best_val) {
          best_val = val;
          best_x = x;
        }
      }
    }
    out.points.row(static_cast<Index>(s)) = best_x.transpose();
    out.values(static_cast<Index>(s)) = best_val;
  }
  return out;
}

BoState bo_init(const BoConfig& cfg) {
  cfg.validate();
  BoState state;
  state.objective = make_objective(cfg.input_dim, cfg.hyp(), derive_seed(cfg.seed, 1));
  state.X_obs = init_design(cfg.input_dim, cfg.n_init, derive_seed(cfg.seed, 2));
  state.y_obs.resize(cfg.n_init);
  for (Index i = 0; i < cfg.n_init; ++i) {
    state.y_obs(i) = state.objective.observe(state.X_obs.row(i).transpose());
  }

  state.priors.reserve(static_cast<std::size_t>(cfg.n_samples));
  for (Index s = 0; s < cfg.n_samples; ++s) {
    state.priors.push_back(
        sample_prior(cfg.hyp(), cfg.input_dim, cfg.num_features, derive_seed(cfg.seed, 100 + s)));
  }

  state.noise_rng = Rng(derive_seed(cfg.seed, 3));
  state.prior_values.resize(cfg.n_init, cfg.n_samples);
  state.noise_draws.resize(cfg.n_init, cfg.n_samples);
  for (Index s = 0; s < cfg.n_samples; ++s) {
    state.prior_values.col(s) = eval_prior(state.priors[static_cast<std::size_t>(s)], state.X_obs);
  }
  for (Index i = 0; i < cfg.n_init; ++i) {
    for (Index s = 0; s < cfg.n_samples; ++s) {
      state.noise_draws(i, s) = cfg.noise_scale * state.noise_rng.normal();
    }
  }

  state.mean_weights.resize(0);
  state.sample_weights.resize(0, cfg.n_samples);
  state.n_solved = 0;
  state.round = 0;
  return state;
}

namespace {

// Budgeted solve that survives SGD divergence: the round keeps the
// initialization weights and records their residual.
SolveResult solve_best_effort(const Matrix& H, const Vector& b, const Initialization& init,
                              const SolverConfig& cfg, const CgPreconditioner& precond) {
  try {
    switch (cfg.method) {
      case Method::CG: return cg_solve_with(H, b, init, cfg, precond);
      case Method::SGD: return sgd_solve(H, b, init, cfg);
      case Method::AP: return ap_solve(H, b, init, cfg);
    }
    throw std::invalid_argument("solve_best_effort: unknown method");
  } catch (const DivergenceError& e) {
    SolveResult res;
    res.v = init_weights(init, init.warm_start ? init.u1.size() : 0,
                         H.rows() - (init.warm_start ? init.u1.size() : 0));
    res.iterations = e.iterations;
    res.residual_history = {relative_residual(H, res.v, b)};
    res.converged = false;
    return res;
  }
}

}  // namespace

TrialRecord bo_round(BoState& state, const BoConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  state.round += 1;

  const Index n_total = state.n_obs();
  const Index n_prev = state.n_solved;
  const Index n_new = n_total - n_prev;

  // Fold the pending observations into the covariance, reusing the old block.
  Matrix H;
  if (n_prev == 0) {
    state.cov = gram_matrix(state.X_obs, cfg.hyp());
    H = state.cov.H;
  } else {
    const Matrix X2 = state.X_obs.bottomRows(n_new);
    const BlockedSystem sys = extend_system(state.cov, X2, state.y_obs.head(n_prev),
                                            state.y_obs.tail(n_new));
    H = sys.assembled();
    state.cov = CovarianceMatrix{H, cfg.hyp(), state.X_obs};
  }

  // One right-hand side for the mean system, one per posterior sample.
  Matrix rhs(n_total, 1 + cfg.n_samples);
  rhs.col(0) = state.y_obs;
  for (Index s = 0; s < cfg.n_samples; ++s) {
    rhs.col(1 + s) = state.prior_values.col(s) + state.noise_draws.col(s);
  }

  const bool warm = cfg.init_mode == InitMode::Warm && n_prev > 0;
  std::vector<Initialization> inits;
  inits.reserve(static_cast<std::size_t>(1 + cfg.n_samples));
  inits.push_back(warm ? Initialization::warm(state.mean_weights) : Initialization::cold());
  for (Index s = 0; s < cfg.n_samples; ++s) {
    inits.push_back(warm ? Initialization::warm(state.sample_weights.col(s))
                         : Initialization::cold());
  }

  SolverConfig scfg = cfg.solver_config();
  CgPreconditioner precond;
  if (scfg.method == Method::CG) {
    precond = CgPreconditioner::from_matrix(H, scfg.precond_rank, scfg.precond_shift,
                                            scfg.precond_shift_mode);
  }

  TrialRecord rec;
  rec.round = state.round;

  state.sample_weights.resize(n_total, cfg.n_samples);  // every column is assigned below
  double sample_residual_sum = 0.0;
  for (Index col = 0; col < rhs.cols(); ++col) {
    SolverConfig per = scfg;
    per.seed = derive_seed(derive_seed(cfg.seed, 0xc0000 + state.round), col);
    const SolveResult res =
        solve_best_effort(H, rhs.col(col), inits[static_cast<std::size_t>(col)], per, precond);
    if (col == 0) {
      state.mean_weights = res.v;
      rec.mean_residual = res.final_residual();
      rec.mean_iterations = res.iterations;
    } else {
      state.sample_weights.col(col - 1) = res.v;
      sample_residual_sum += res.final_residual();
      rec.max_sample_iterations = std::max(rec.max_sample_iterations, res.iterations);
    }
  }
  rec.avg_sample_residual = sample_residual_sum / static_cast<double>(cfg.n_samples);
  state.n_solved = n_total;

  // Pathwise posterior samples share the mean weights.
  std::vector<PosteriorSample> samples;
  samples.reserve(static_cast<std::size_t>(cfg.n_samples));
  for (Index s = 0; s < cfg.n_samples; ++s) {
    samples.push_back(PosteriorSample{state.priors[static_cast<std::size_t>(s)], state.X_obs,
                                      state.mean_weights - state.sample_weights.col(s),
                                      cfg.hyp()});
  }

  const auto peaks = select_peaks(samples, state, cfg.proposal_rounds, cfg.proposal_count, cfg,
                                  derive_seed(cfg.seed, 0xa0000 + state.round));
  const auto ascended = ascend_peaks(samples, peaks, cfg.ascent_steps, cfg.ascent_rate,
                                     derive_seed(cfg.seed, 0xb0000 + state.round));

  // Acquire one point per posterior sample.
  const Index batch = cfg.batch_size;
  state.X_obs.conservativeResize(n_total + batch, Eigen::NoChange);
  state.y_obs.conservativeResize(n_total + batch);
  state.prior_values.conservativeResize(n_total + batch, Eigen::NoChange);
  state.noise_draws.conservativeResize(n_total + batch, Eigen::NoChange);
  for (Index i = 0; i < batch; ++i) {
    const Vector x = ascended.points.row(i).transpose();
    state.X_obs.row(n_total + i) = x.transpose();
    state.y_obs(n_total + i) = state.objective.observe(x);
  }
  const Matrix new_rows = state.X_obs.bottomRows(batch);
  for (Index s = 0; s < cfg.n_samples; ++s) {
    state.prior_values.col(s).tail(batch) =
        eval_prior(state.priors[static_cast<std::size_t>(s)], new_rows);
  }
  for (Index i = 0; i < batch; ++i) {
    for (Index s = 0; s < cfg.n_samples; ++s) {
      state.noise_draws(n_total + i, s) = cfg.noise_scale * state.noise_rng.normal();
    }
  }

  rec.best_value = state.y_obs.maxCoeff();
  rec.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::vector<TrialRecord> run_bo(const BoConfig& cfg) {
  BoState state = bo_init(cfg);

  std::vector<TrialRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.n_rounds + 1));
  TrialRecord initial;
  initial.round = 0;
  initial.best_value = state.y_obs.maxCoeff();
  initial.mean_residual = std::numeric_limits<double>::quiet_NaN();
  initial.avg_sample_residual = std::numeric_limits<double>::quiet_NaN();
  records.push_back(initial);

  for (int r = 0; r < cfg.n_rounds; ++r) {
    records.push_back(bo_round(state, cfg));
  }
  return records;
}

}  // namespace warmgp
