#include "warmgp/bench/regression.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "warmgp/rng.hpp"
#include "warmgp/sampling.hpp"

namespace warmgp::bench {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_text(const RegressionConfig& cfg, const std::string& dataset,
                        double chosen_lr) {
  std::ostringstream os;
  os << "command=regression-bench\n"
     << "dataset=" << dataset << "\n"
     << "data_path=" << cfg.data_path << "\n"
     << "target_column=" << cfg.target_column << "\n"
     << "has_header=" << (cfg.has_header ? 1 : 0) << "\n"
     << "n1=" << cfg.n1 << "\nn2=" << cfg.n2 << "\ntrials=" << cfg.trials << "\n"
     << "tolerance=" << fmt(cfg.tolerance) << "\n";
  os << "solvers=";
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i) {
    os << (i ? "," : "") << method_name(cfg.solvers[i]);
  }
  os << "\nseed=" << cfg.seed << "\nmll_steps=" << cfg.mll_steps
     << "\nmll_rate=" << fmt(cfg.mll_rate) << "\nnum_features=" << cfg.num_features
     << "\nsgd_learning_rate=" << fmt(chosen_lr) << "\nsgd_momentum=" << fmt(cfg.sgd_momentum)
     << "\nsgd_batch=" << cfg.sgd_batch << "\nap_block=" << cfg.ap_block
     << "\ncg_rank=" << cfg.cg_rank << "\ncg_max_iters=" << cfg.cg_max_iters
     << "\nsgd_max_iters=" << cfg.sgd_max_iters << "\nap_max_iters=" << cfg.ap_max_iters
     << "\n";
  return os.str();
}

SolverConfig solver_config_for(const RegressionConfig& cfg, Method m, double sgd_lr,
                               double noise_scale, std::uint64_t seed) {
  SolverConfig s;
  s.method = m;
  s.tolerance = cfg.tolerance;
  s.learning_rate = sgd_lr;
  s.momentum = cfg.sgd_momentum;
  s.batch_size = cfg.sgd_batch;
  s.sgd_scaling = cfg.sgd_scaling;
  s.block_size = cfg.ap_block;
  s.precond_rank = cfg.cg_rank;
  s.precond_shift = noise_scale * noise_scale;
  s.seed = seed;
  switch (m) {
    case Method::CG: s.max_iters = cfg.cg_max_iters; break;
    case Method::SGD: s.max_iters = cfg.sgd_max_iters; break;
    case Method::AP: s.max_iters = cfg.ap_max_iters; break;
  }
  return s;
}

// Picks the grid learning rate that converges in the fewest iterations on a
// probe system (smallest final residual as the fallback when none converge).
double grid_search_sgd_lr(const Matrix& H, const Vector& b, const RegressionConfig& cfg,
                          double noise_scale) {
  double best_lr = cfg.sgd_grid.front();
  bool best_converged = false;
  int best_iters = std::numeric_limits<int>::max();
  double best_res = std::numeric_limits<double>::infinity();
  for (const double lr : cfg.sgd_grid) {
    SolverConfig s = solver_config_for(cfg, Method::SGD, lr, noise_scale, 0x9d1d);
    double res = std::numeric_limits<double>::infinity();
    int iters = std::numeric_limits<int>::max();
    bool conv = false;
    try {
      const SolveResult r = sgd_solve(H, b, Initialization::cold(), s);
      res = r.final_residual();
      iters = r.iterations;
      conv = r.converged;
    } catch (const DivergenceError&) {
      continue;
    }
    const bool better = conv != best_converged ? conv
                        : conv                 ? iters < best_iters
                                               : res < best_res;
    if (better) {
      best_lr = lr;
      best_converged = conv;
      best_iters = iters;
      best_res = res;
    }
  }
  return best_lr;
}

}  // namespace

RegressionOutcome run_regression_bench(const RegressionConfig& cfg, const Dataset& standardized) {
  if (cfg.n1 <= 0 || cfg.n2 <= 0 || cfg.trials <= 0) {
    throw std::invalid_argument("regression bench: n1, n2 and trials must be positive");
  }
  if (cfg.n1 + cfg.n2 > standardized.size()) {
    throw std::invalid_argument("regression bench: n1 + n2 exceeds dataset size");
  }

  RegressionOutcome out;
  out.dataset_name = standardized.name;
  const bool wants_sgd =
      std::find(cfg.solvers.begin(), cfg.solvers.end(), Method::SGD) != cfg.solvers.end();
  double sgd_lr = cfg.sgd_learning_rate;

  const auto flush = [&]() {
    if (cfg.out_dir.empty()) return;
    std::filesystem::create_directories(cfg.out_dir);
    const std::string base = cfg.out_dir + "/regression_" + out.dataset_name;
    write_regression_csv(base + ".csv", out.rows);
    const std::string text = config_text(cfg, out.dataset_name, sgd_lr);
    std::ofstream side(base + ".config.txt");
    side << text << "config_hash=" << std::hex << fnv1a(text) << std::dec << "\n";
  };

  try {
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const std::uint64_t tseed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(trial));
    const SequentialSplit split = sample_split(standardized, cfg.n1, cfg.n2, tseed);

    KernelHyperparams hyp0;
    hyp0.lengthscale = median_heuristic_lengthscale(split.X1, tseed);
    hyp0.signal_scale = 1.0;
    hyp0.noise_scale = 0.1;
    const KernelHyperparams hyp =
        optimize_mll(split.X1, split.y1, hyp0, cfg.mll_steps, cfg.mll_rate);

    const CovarianceMatrix cov1 = gram_matrix(split.X1, hyp);
    Matrix X_full(cfg.n1 + cfg.n2, split.X1.cols());
    X_full.topRows(cfg.n1) = split.X1;
    X_full.bottomRows(cfg.n2) = split.X2;

    for (const char* system : {"mean", "sample"}) {
      Vector b1, b2;
      if (std::string_view(system) == "mean") {
        b1 = split.y1;
        b2 = split.y2;
      } else {
        const RffPrior prior = sample_prior(hyp, X_full.cols(), cfg.num_features,
                                            derive_seed(tseed, 7));
        const Vector rhs_full =
            build_sample_rhs(prior, X_full, hyp.noise_scale, derive_seed(tseed, 8));
        b1 = rhs_full.head(cfg.n1);
        b2 = rhs_full.tail(cfg.n2);
      }

      const Vector u1 = exact_solve(cov1.H, b1);
      const BlockedSystem sys = extend_system(cov1, split.X2, b1, b2);
      const Matrix H = sys.assembled();
      const Vector b = sys.rhs();
      const DistanceReport rep = warm_start_report(sys);

      if (wants_sgd && sgd_lr == 0.0) {
        sgd_lr = grid_search_sgd_lr(H, b, cfg, hyp.noise_scale);
      }

      for (std::size_t si = 0; si < cfg.solvers.size(); ++si) {
        const Method m = cfg.solvers[si];
        const SolverConfig scfg =
            solver_config_for(cfg, m, sgd_lr, hyp.noise_scale, derive_seed(tseed, 10 + si));
        for (const InitMode mode : {InitMode::Cold, InitMode::Warm}) {
          const Initialization init = mode == InitMode::Warm ? Initialization::warm(u1)
                                                             : Initialization::cold();
          RegressionRow row;
          row.trial = trial;
          row.solver = m;
          row.system = system;
          row.init = mode;
          row.identity_gap = rep.identity_gap;
          row.seed = tseed;
          if (mode == InitMode::Warm) {
            row.d_euclid_ratio = rep.euclid_ratio();
            row.d_rkhs_ratio = rep.rkhs_ratio();
          }
          try {
            const SolveResult res = solve(H, b, init, scfg);
            row.iters = res.iterations;
            row.converged = res.converged;
            row.final_rel_residual = res.final_residual();
          } catch (const DivergenceError& e) {
            row.iters = e.iterations;
            row.converged = false;
            row.final_rel_residual = std::numeric_limits<double>::quiet_NaN();
          }
          out.rows.push_back(std::move(row));
        }
      }
    }
  }
  } catch (...) {
    // Keep whatever completed on disk before propagating the failure.
    out.chosen_sgd_lr = sgd_lr;
    flush();
    throw;
  }
  out.chosen_sgd_lr = sgd_lr;
  flush();
  return out;
}

RegressionOutcome run_regression_bench(const RegressionConfig& cfg) {
  Index target = cfg.target_column;
  if (target < 0) {
    // Negative index: target is the last column.
    const Dataset probe = load_csv(cfg.data_path, 0, cfg.has_header);
    target = probe.dim();
  }
  const Dataset raw = load_csv(cfg.data_path, target, cfg.has_header);
  auto [standardized, params] = standardize(raw);
  (void)params;
  return run_regression_bench(cfg, standardized);
}

void write_regression_csv(const std::string& path, const std::vector<RegressionRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_regression_csv: cannot open '" + path + "'");
  out << kRegressionCsvHeader << "\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << method_name(r.solver) << ',' << r.system << ','
        << init_mode_name(r.init) << ',' << r.iters << ',' << (r.converged ? 1 : 0) << ','
        << fmt(r.final_rel_residual) << ',' << fmt(r.d_euclid_ratio) << ','
        << fmt(r.d_rkhs_ratio) << ',' << fmt(r.identity_gap) << ',' << r.seed << "\n";
  }
}

}  // namespace warmgp::bench
