// Acceptance suite: every release criterion runs at its pinned tolerance and
// prints one PASS/FAIL line. Criteria can be selected by number on the
// command line; the default runs all of them.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "warmgp/analysis.hpp"
#include "warmgp/bench/datagen.hpp"
#include "warmgp/bench/regression.hpp"
#include "warmgp/bench/thompson.hpp"
#include "warmgp/bench/verify.hpp"
#include "warmgp/sampling.hpp"
#include "warmgp/solvers.hpp"
#include "warmgp/thompson.hpp"

using namespace warmgp;

namespace {

struct Criterion {
  int id = 0;
  bool pass = false;
  std::string summary;
};

// --- 1: warm-start distance identity --------------------------------------

Criterion criterion_identity() {
  Criterion c{1, true, ""};
  Rng rng(0xacce11);
  double worst_gap = 0.0;
  int ordering_failures = 0;
  const int systems = 50;
  for (int i = 0; i < systems; ++i) {
    const BlockedSystem sys = bench::random_blocked_system(rng, 50, 500, 5, 100);
    const DistanceReport rep = warm_start_report(sys);
    worst_gap = std::max(worst_gap, std::abs(rep.identity_gap) / std::max(rep.d_cold_sq, 1.0));
    if (rep.d_warm_sq > rep.d_cold_sq) ++ordering_failures;
    if (sys.b1.norm() > 0.0 && !(rep.d_warm_sq < rep.d_cold_sq)) ++ordering_failures;
  }
  c.pass = worst_gap <= 1e-8 && ordering_failures == 0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "distance identity on %d random blocked systems: max gap %.2e (bound 1e-8), "
                "%d ordering violations",
                systems, worst_gap, ordering_failures);
  c.summary = buf;
  return c;
}

// --- 2 + 3: regression benchmark on the dataset stand-ins -----------------

struct RegressionStats {
  std::map<std::string, double> mean_rkhs, mean_euclid;       // per dataset/system
  std::map<std::string, double> mean_ratio;                   // per dataset/solver
  int dominated = 0, pairs = 0;
};

RegressionStats run_regression_criteria() {
  RegressionStats stats;
  std::map<std::string, std::pair<double, int>> rkhs, euclid, ratio;
  for (const char* preset : {"pol", "elevators"}) {
    const Dataset raw = bench::make_synthetic_dataset(preset, 3000, 0, 1);
    const auto standardized = standardize(raw).first;

    bench::RegressionConfig cfg;
    cfg.n1 = 1000;
    cfg.n2 = 100;
    cfg.trials = 10;
    cfg.tolerance = 0.01;
    cfg.mll_steps = 300;
    cfg.sgd_grid = {0.001, 0.003, 0.01, 0.03, 0.1, 0.3};
    cfg.ap_max_iters = 30000;
    cfg.sgd_max_iters = 30000;
    cfg.seed = 7;
    const auto outcome = bench::run_regression_bench(cfg, standardized);

    for (std::size_t i = 0; i + 1 < outcome.rows.size(); i += 2) {
      const auto& cold = outcome.rows[i];
      const auto& warm = outcome.rows[i + 1];
      stats.pairs += 1;
      if (warm.iters <= cold.iters) stats.dominated += 1;
      auto& r = ratio[std::string(preset) + "/" + method_name(cold.solver)];
      r.first += static_cast<double>(warm.iters) / static_cast<double>(cold.iters);
      r.second += 1;
      if (cold.solver == Method::CG) {  // distances repeat across solvers
        auto& k = rkhs[std::string(preset) + "/" + cold.system];
        k.first += warm.d_rkhs_ratio;
        k.second += 1;
        auto& e = euclid[std::string(preset) + "/" + cold.system];
        e.first += warm.d_euclid_ratio;
        e.second += 1;
      }
    }
  }
  for (const auto& [k, v] : rkhs) stats.mean_rkhs[k] = v.first / v.second;
  for (const auto& [k, v] : euclid) stats.mean_euclid[k] = v.first / v.second;
  for (const auto& [k, v] : ratio) stats.mean_ratio[k] = v.first / v.second;
  return stats;
}

Criterion criterion_initial_distance(const RegressionStats& stats) {
  Criterion c{2, true, ""};
  double lo = 1.0, hi = 0.0;
  for (const auto& m : {stats.mean_rkhs, stats.mean_euclid}) {
    for (const auto& [key, value] : m) {
      lo = std::min(lo, value);
      hi = std::max(hi, value);
      if (value < 0.15 || value > 0.55) c.pass = false;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "mean warm/cold initial distance per dataset and system in [%.3f, %.3f] "
                "(required within [0.15, 0.55])",
                lo, hi);
  c.summary = buf;
  return c;
}

Criterion criterion_iteration_reduction(const RegressionStats& stats) {
  Criterion c{3, true, ""};
  const double dominance = static_cast<double>(stats.dominated) / stats.pairs;
  if (dominance < 0.95) c.pass = false;
  double worst_cg_sgd = 0.0, worst_ap = 0.0;
  for (const auto& [key, value] : stats.mean_ratio) {
    if (key.find("/ap") != std::string::npos) {
      worst_ap = std::max(worst_ap, value);
      if (value > 0.50) c.pass = false;
    } else {
      worst_cg_sgd = std::max(worst_cg_sgd, value);
      if (value > 0.80) c.pass = false;
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "dominance %d/%d (>=95%%); worst mean iteration ratio cg/sgd %.3f (<=0.80), "
                "ap %.3f (<=0.50)",
                stats.dominated, stats.pairs, worst_cg_sgd, worst_ap);
  c.summary = buf;
  return c;
}

// --- 4: solver-oracle equivalence ------------------------------------------

Criterion criterion_solver_oracle() {
  Criterion c{4, true, ""};
  Rng rng(0xacce14);
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Index n = 200;
    const KernelHyperparams hyp{rng.uniform(0.3, 0.8), 1.0, rng.uniform(0.4, 0.8)};
    const Matrix H = gram_matrix(bench::random_inputs(rng, n, 3), hyp).H;
    Vector b(n);
    for (Index j = 0; j < n; ++j) b(j) = rng.normal();
    const Vector v_exact = exact_solve(H, b);
    const double norm = rkhs_distance(H, Vector::Zero(n), v_exact);

    for (const Method m : {Method::CG, Method::SGD, Method::AP}) {
      SolverConfig cfg;
      cfg.method = m;
      cfg.tolerance = 1e-6;
      cfg.max_iters = 400000;
      cfg.momentum = 0.9;
      cfg.batch_size = 100;
      cfg.block_size = 100;
      cfg.precond_rank = 100;
      cfg.precond_shift = hyp.noise_scale * hyp.noise_scale;
      cfg.seed = rng.next_u64();

      SolveResult res;
      if (m == Method::SGD) {
        bool solved = false;
        for (const double lr : {0.03, 0.01, 0.003, 0.001}) {
          cfg.learning_rate = lr;
          try {
            res = sgd_solve(H, b, Initialization::cold(), cfg);
          } catch (const DivergenceError&) {
            continue;
          }
          if (res.converged) {
            solved = true;
            break;
          }
        }
        if (!solved) {
          c.pass = false;
          continue;
        }
      } else {
        res = solve(H, b, Initialization::cold(), cfg);
        if (!res.converged) c.pass = false;
      }
      worst = std::max(worst, rkhs_distance(H, res.v, v_exact) / norm);
    }
  }
  if (worst > 1e-4) c.pass = false;

  // Plain CG finishes a 50x50 system within n iterations at 1e-8.
  bool krylov_ok = true;
  for (int i = 0; i < 3; ++i) {
    const KernelHyperparams hyp{0.5, 1.0, 0.5};
    const Matrix H = gram_matrix(bench::random_inputs(rng, 50, 3), hyp).H;
    Vector b(50);
    for (Index j = 0; j < 50; ++j) b(j) = rng.normal();
    SolverConfig cfg;
    cfg.tolerance = 1e-8;
    cfg.max_iters = 50;
    cfg.precond_rank = 0;
    if (!cg_solve(H, b, Initialization::cold(), cfg).converged) krylov_ok = false;
  }
  if (!krylov_ok) c.pass = false;

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "solver vs direct oracle at 1e-6: worst energy-norm error %.2e (bound 1e-4); "
                "CG within n iterations: %s",
                worst, krylov_ok ? "yes" : "NO");
  c.summary = buf;
  return c;
}

// --- 5: pathwise conditioning ----------------------------------------------

Criterion criterion_pathwise() {
  Criterion c{5, true, ""};
  Rng rng(0xacce15);
  const KernelHyperparams hyp{0.5, 1.0, 0.1};
  const Matrix X = bench::random_inputs(rng, 40, 3);
  Vector y(40);
  for (Index i = 0; i < 40; ++i) y(i) = rng.normal();
  const Matrix H = gram_matrix(X, hyp).H;

  // Posterior mean through representer weights versus the closed form,
  // evaluated with scalar kernel calls.
  RffPrior silent = sample_prior(hyp, 3, 8, 1);
  silent.amplitudes.setZero();
  PosteriorSample mean{silent, X, exact_solve(H, y), hyp};
  const Matrix probes = bench::random_inputs(rng, 20, 3);
  const Vector got = eval_posterior(mean, probes);
  const Vector alpha = exact_solve(H, y);
  double worst_mean = 0.0;
  for (Index i = 0; i < probes.rows(); ++i) {
    double mu = 0.0;
    for (Index j = 0; j < X.rows(); ++j) {
      mu += matern32(probes.row(i).transpose(), X.row(j).transpose(), hyp) * alpha(j);
    }
    worst_mean = std::max(worst_mean, std::abs(mu - got(i)));
  }
  if (worst_mean > 1e-8) c.pass = false;

  // Nearly noiseless samples interpolate the targets.
  const KernelHyperparams tiny{0.5, 1.0, 1e-10};
  const Matrix Xs = bench::random_inputs(rng, 20, 3);
  Vector ys(20);
  for (Index i = 0; i < 20; ++i) ys(i) = rng.normal();
  const Matrix Hs = gram_matrix(Xs, tiny).H;
  double worst_interp = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const RffPrior prior = sample_prior(tiny, 3, 2000, 100 + rep);
    const Vector rhs = ys - build_sample_rhs(prior, Xs, 1e-10, 200 + rep);
    PosteriorSample s{prior, Xs, exact_solve(Hs, rhs), tiny};
    worst_interp =
        std::max(worst_interp, (eval_posterior(s, Xs) - ys).cwiseAbs().maxCoeff());
  }
  if (worst_interp > 1e-5) c.pass = false;

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "closed-form mean error %.2e (bound 1e-8); near-noiseless interpolation "
                "error %.2e (bound 1e-5)",
                worst_mean, worst_interp);
  c.summary = buf;
  return c;
}

// --- 6: random-feature fidelity ---------------------------------------------

double mc_covariance(const Vector& x, const Vector& xp, const KernelHyperparams& hyp, Index F,
                     int draws, std::uint64_t seed) {
  Matrix pts(2, x.size());
  pts.row(0) = x.transpose();
  pts.row(1) = xp.transpose();
  double acc = 0.0;
  for (int d = 0; d < draws; ++d) {
    const RffPrior p = sample_prior(hyp, x.size(), F, derive_seed(seed, d));
    Matrix phase = pts * p.frequencies.transpose();
    phase.rowwise() += p.phases.transpose();
    const Matrix feat = phase.array().cos().matrix();
    acc += p.signal_scale * p.signal_scale * 2.0 / static_cast<double>(F) *
           feat.row(0).dot(feat.row(1));
  }
  return acc / draws;
}

Criterion criterion_rff() {
  Criterion c{6, true, ""};
  const KernelHyperparams hyp{0.6, 1.0, 1e-3};
  Rng rng(0xacce16);
  const int draws = 200;
  double worst = 0.0;
  int trend_failures = 0;
  for (int batch = 0; batch < 4; ++batch) {
    double err50 = 0.0, err2000 = 0.0;
    for (int p = 0; p < 5; ++p) {
      Vector x(3), xp(3);
      for (int d = 0; d < 3; ++d) {
        x(d) = rng.uniform();
        xp(d) = std::clamp(x(d) + hyp.lengthscale * rng.uniform(-1.0, 1.0), 0.0, 1.0);
      }
      const double truth = matern32(x, xp, hyp);
      const int pair_id = 10 * batch + p;
      const double e2000 =
          std::abs(mc_covariance(x, xp, hyp, 2000, draws, derive_seed(61, pair_id)) - truth);
      const double e50 =
          std::abs(mc_covariance(x, xp, hyp, 50, draws, derive_seed(62, pair_id)) - truth);
      worst = std::max(worst, e2000);
      err50 += e50;
      err2000 += e2000;
    }
    if (!(err2000 < err50)) ++trend_failures;
  }
  c.pass = worst <= 0.1 && trend_failures == 0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "Monte-Carlo covariance over %d draws: max |err| %.3g (bound 0.1); batches "
                "where F=2000 did not beat F=50: %d",
                draws, worst, trend_failures);
  c.summary = buf;
  return c;
}

// --- 7: MLL gradient ---------------------------------------------------------

Criterion criterion_mll_gradient() {
  Criterion c{7, true, ""};
  Rng rng(0xacce17);
  double worst = 0.0;
  const double h = 1e-4;
  for (int i = 0; i < 20; ++i) {
    const Matrix X = bench::random_inputs(rng, 50, 3);
    Vector y(50);
    for (Index j = 0; j < 50; ++j) y(j) = rng.normal();
    const KernelHyperparams hyp{std::exp(rng.uniform(std::log(0.5), std::log(2.0))),
                                std::exp(rng.uniform(std::log(0.5), std::log(2.0))),
                                std::exp(rng.uniform(std::log(0.2), std::log(1.0)))};
    const MllResult res = mll(X, y, hyp);
    Eigen::Vector3d theta(std::log(hyp.lengthscale), std::log(hyp.signal_scale),
                          std::log(hyp.noise_scale));
    Eigen::Vector3d fd;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d tp = theta, tm = theta;
      tp(k) += h;
      tm(k) -= h;
      fd(k) = (mll(X, y, {std::exp(tp(0)), std::exp(tp(1)), std::exp(tp(2))}).value -
               mll(X, y, {std::exp(tm(0)), std::exp(tm(1)), std::exp(tm(2))}).value) /
              (2.0 * h);
    }
    worst = std::max(worst, (fd - res.grad).norm() / res.grad.norm());
  }
  c.pass = worst <= 1e-5;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "analytic vs central-difference gradient over 20 settings: worst relative "
                "error %.2e (bound 1e-5)",
                worst);
  c.summary = buf;
  return c;
}

// --- 8: budgeted Thompson sampling ------------------------------------------

Criterion criterion_thompson() {
  Criterion c{8, true, ""};
  bench::ThompsonBenchConfig cfg;
  cfg.base.input_dim = 3;
  cfg.base.n_init = 500;
  cfg.base.n_samples = 10;
  cfg.base.batch_size = 10;
  cfg.base.n_rounds = 10;
  cfg.base.budget = BoBudget::small();
  cfg.base.num_features = 2000;
  cfg.base.proposal_count = 250;
  cfg.base.proposal_rounds = 5;
  cfg.base.ascent_steps = 30;
  cfg.lengthscales = {0.1, 0.2, 0.3, 0.4, 0.5};
  cfg.n_seeds = 2;
  cfg.solvers = {Method::CG};
  cfg.inits = {InitMode::Warm, InitMode::Cold};
  const auto runs = bench::run_thompson_bench(cfg);

  int wins = 0, pairs = 0;
  double warm_best = 0.0, cold_best = 0.0;
  int n_runs = 0;
  for (std::size_t i = 0; i + 1 < runs.size(); i += 2) {
    const auto& warm = runs[i];
    const auto& cold = runs[i + 1];
    for (int round = 3; round <= cfg.base.n_rounds; ++round) {
      pairs += 1;
      if (warm.records[round].mean_residual <= cold.records[round].mean_residual) wins += 1;
    }
    warm_best += warm.records.back().best_value;
    cold_best += cold.records.back().best_value;
    n_runs += 1;
  }
  warm_best /= n_runs;
  cold_best /= n_runs;
  const double win_rate = static_cast<double>(wins) / pairs;
  c.pass = win_rate >= 0.80 && warm_best >= cold_best;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "warm residual <= cold in %d/%d (round >= 3) pairs (%.0f%%, need >=80%%); "
                "final mean best value warm %.4f vs cold %.4f",
                wins, pairs, 100.0 * win_rate, warm_best, cold_best);
  c.summary = buf;
  return c;
}

// --- 9: budget enforcement ----------------------------------------------------

Criterion criterion_budgets() {
  Criterion c{9, true, ""};
  int worst_excess = 0;
  for (const bool large : {false, true}) {
    const BoBudget budget = large ? BoBudget::large() : BoBudget::small();
    for (const Method m : {Method::CG, Method::SGD, Method::AP}) {
      BoConfig cfg;
      cfg.input_dim = 2;
      cfg.n_init = 80;
      cfg.n_samples = 3;
      cfg.batch_size = 3;
      cfg.n_rounds = 2;
      cfg.lengthscale = 0.3;
      cfg.num_features = 64;
      cfg.proposal_count = 40;
      cfg.proposal_rounds = 2;
      cfg.ascent_steps = 3;
      cfg.solver = m;
      cfg.budget = budget;
      cfg.tolerance = 0.0;  // make the cap bind
      cfg.sgd_batch = 20;
      cfg.ap_block = 20;
      cfg.cg_rank = 20;
      cfg.seed = 31;
      const auto records = run_bo(cfg);
      const int cap = budget.iters_for(m);
      for (std::size_t i = 1; i < records.size(); ++i) {
        worst_excess = std::max(worst_excess, records[i].mean_iterations - cap);
        worst_excess = std::max(worst_excess, records[i].max_sample_iterations - cap);
      }
    }
  }
  c.pass = worst_excess <= 0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "recorded iterations never exceed the (5,120,30)/(25,600,150) caps: "
                "worst excess %d",
                worst_excess);
  c.summary = buf;
  return c;
}

void print(const Criterion& c) {
  std::printf("[%s] criterion %d: %s\n", c.pass ? "PASS" : "FAIL", c.id, c.summary.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
  const auto selected = [&](int id) { return wanted.empty() || wanted.count(id) > 0; };

  std::vector<Criterion> results;
  if (selected(1)) {
    results.push_back(criterion_identity());
    print(results.back());
  }
  if (selected(2) || selected(3)) {
    const RegressionStats stats = run_regression_criteria();
    if (selected(2)) {
      results.push_back(criterion_initial_distance(stats));
      print(results.back());
    }
    if (selected(3)) {
      results.push_back(criterion_iteration_reduction(stats));
      print(results.back());
    }
  }
  if (selected(4)) {
    results.push_back(criterion_solver_oracle());
    print(results.back());
  }
  if (selected(5)) {
    results.push_back(criterion_pathwise());
    print(results.back());
  }
  if (selected(6)) {
    results.push_back(criterion_rff());
    print(results.back());
  }
  if (selected(7)) {
    results.push_back(criterion_mll_gradient());
    print(results.back());
  }
  if (selected(8)) {
    results.push_back(criterion_thompson());
    print(results.back());
  }
  if (selected(9)) {
    results.push_back(criterion_budgets());
    print(results.back());
  }

  const bool all_pass =
      std::all_of(results.begin(), results.end(), [](const auto& c) { return c.pass; });
  std::printf("%zu criteria run: %s\n", results.size(), all_pass ? "all passed" : "FAILURES");
  return all_pass ? 0 : 1;
}
