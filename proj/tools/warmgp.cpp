#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "warmgp/bench/datagen.hpp"
#include "warmgp/bench/regression.hpp"
#include "warmgp/bench/thompson.hpp"
#include "warmgp/bench/verify.hpp"

namespace {

using namespace warmgp;

std::vector<Method> parse_solvers(const std::vector<std::string>& names) {
  std::vector<Method> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(method_from_name(n));
  return out;
}

std::vector<InitMode> parse_inits(const std::vector<std::string>& names) {
  std::vector<InitMode> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(init_mode_from_name(n));
  return out;
}

int cmd_regression_bench(bench::RegressionConfig cfg, const std::vector<std::string>& solvers) {
  cfg.solvers = parse_solvers(solvers);
  const auto outcome = bench::run_regression_bench(cfg);
  std::cout << "dataset " << outcome.dataset_name << ": " << outcome.rows.size()
            << " rows";
  if (!cfg.out_dir.empty()) {
    std::cout << " -> " << cfg.out_dir << "/regression_" << outcome.dataset_name << ".csv";
  }
  std::cout << "\n";
  if (outcome.chosen_sgd_lr > 0.0) {
    std::cout << "sgd learning rate: " << outcome.chosen_sgd_lr << "\n";
  }
  return 0;
}

int cmd_thompson_bench(bench::ThompsonBenchConfig cfg, const std::vector<std::string>& solvers,
                       const std::vector<std::string>& inits, const std::string& budget,
                       bool summary) {
  cfg.solvers = parse_solvers(solvers);
  cfg.inits = parse_inits(inits);
  if (budget == "small") {
    cfg.base.budget = BoBudget::small();
  } else if (budget == "large") {
    cfg.base.budget = BoBudget::large();
  } else {
    throw CLI::ValidationError("--budget", "expected 'small' or 'large'");
  }
  const auto runs = bench::run_thompson_bench(cfg);
  std::cout << runs.size() << " runs";
  if (!cfg.out_dir.empty()) std::cout << " -> " << cfg.out_dir;
  std::cout << "\n";

  if (summary) {
    // Mean and standard error of the final round across (lengthscale, seed).
    std::map<std::pair<std::string, std::string>, std::vector<double>> best, resid;
    for (const auto& run : runs) {
      const auto key = std::make_pair(std::string(init_mode_name(run.init)),
                                      std::string(method_name(run.solver)));
      best[key].push_back(run.records.back().best_value);
      resid[key].push_back(run.records.back().mean_residual);
    }
    std::cout << "final round, mean +- stderr over runs:\n";
    for (const auto& [key, values] : best) {
      const double n = static_cast<double>(values.size());
      double m = 0.0, m2 = 0.0, r = 0.0;
      for (const double v : values) m += v;
      m /= n;
      for (const double v : values) m2 += (v - m) * (v - m);
      for (const double v : resid[key]) r += v;
      const double se = n > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
      std::cout << "  " << key.second << " " << key.first << ": best " << m << " +- " << se
                << ", mean residual " << r / n << "\n";
    }
  }
  return 0;
}

int cmd_verify(bool quick, std::uint64_t seed) {
  bench::VerifyOptions opt;
  opt.quick = quick;
  opt.seed = seed;
  const auto report = bench::run_verify(opt);
  bench::print_verify_report(report, std::cout);
  return report.all_pass() ? 0 : 1;
}

int cmd_make_data(const std::string& preset, Index rows, Index dim, const std::string& out,
                  std::uint64_t seed) {
  const Dataset d = bench::make_synthetic_dataset(preset, rows, dim, seed);
  bench::write_csv(d, out);
  std::cout << d.name << ": " << d.size() << " rows x " << d.dim() << " features -> " << out
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"warmgp: warm-started iterative solvers for Gaussian process posteriors"};
  app.require_subcommand(1);

  // regression-bench
  bench::RegressionConfig rc;
  std::vector<std::string> reg_solvers = {"cg", "sgd", "ap"};
  auto* reg = app.add_subcommand("regression-bench",
                                 "Warm versus cold solves on a growing regression dataset");
  reg->set_config("--config");
  reg->add_option("--data", rc.data_path, "CSV dataset")->required();
  reg->add_option("--target-col", rc.target_column, "zero-based target column (negative: last)");
  reg->add_flag("--has-header", rc.has_header, "skip the first CSV line");
  reg->add_option("--n1", rc.n1, "initial points");
  reg->add_option("--n2", rc.n2, "added points");
  reg->add_option("--trials", rc.trials, "repetitions");
  reg->add_option("--tol", rc.tolerance, "relative residual tolerance");
  reg->add_option("--solvers", reg_solvers, "subset of cg,sgd,ap")->delimiter(',');
  reg->add_option("--out", rc.out_dir, "output directory");
  reg->add_option("--seed", rc.seed, "base seed");
  reg->add_option("--mll-steps", rc.mll_steps, "hyperparameter fit steps");
  reg->add_option("--mll-rate", rc.mll_rate, "hyperparameter fit step size");
  reg->add_option("--features", rc.num_features, "random Fourier features");
  reg->add_option("--sgd-lr", rc.sgd_learning_rate, "SGD learning rate (0: grid search)");
  reg->add_option("--sgd-lr-grid", rc.sgd_grid, "grid searched when --sgd-lr is 0")
      ->delimiter(',');
  reg->add_option("--sgd-momentum", rc.sgd_momentum, "SGD momentum");
  reg->add_option("--sgd-batch", rc.sgd_batch, "SGD batch size");
  reg->add_option("--ap-block", rc.ap_block, "AP block size");
  reg->add_option("--cg-rank", rc.cg_rank, "pivoted Cholesky preconditioner rank");
  reg->add_option("--cg-max-iters", rc.cg_max_iters, "CG iteration cap");
  reg->add_option("--sgd-max-iters", rc.sgd_max_iters, "SGD iteration cap");
  reg->add_option("--ap-max-iters", rc.ap_max_iters, "AP iteration cap");

  // thompson-bench
  bench::ThompsonBenchConfig tc;
  std::vector<std::string> th_solvers = {"cg", "sgd", "ap"};
  std::vector<std::string> th_inits = {"warm", "cold"};
  std::string budget = "small";
  bool summary = false;
  auto* th = app.add_subcommand("thompson-bench",
                                "Budgeted parallel Thompson sampling, warm versus cold");
  th->set_config("--config");
  th->add_option("--dim", tc.base.input_dim, "input dimension");
  th->add_option("--n-init", tc.base.n_init, "initial design size");
  auto* samples_opt = th->add_option("--samples", tc.base.n_samples, "posterior samples per round");
  auto* batch_opt = th->add_option("--batch", tc.base.batch_size, "acquisitions per round");
  th->add_option("--rounds", tc.base.n_rounds, "acquisition rounds");
  th->add_option("--budget", budget, "small or large");
  th->add_option("--lengthscales", tc.lengthscales, "kernel lengthscale grid")->delimiter(',');
  th->add_option("--seeds", tc.n_seeds, "number of seeds per lengthscale");
  th->add_option("--seed-base", tc.seed_base, "base seed");
  th->add_option("--solvers", th_solvers, "subset of cg,sgd,ap")->delimiter(',');
  th->add_option("--inits", th_inits, "subset of warm,cold")->delimiter(',');
  th->add_option("--features", tc.base.num_features, "random Fourier features");
  th->add_option("--tol", tc.base.tolerance, "relative residual tolerance");
  th->add_option("--signal-scale", tc.base.signal_scale, "kernel signal scale");
  th->add_option("--noise-scale", tc.base.noise_scale, "observation noise scale");
  th->add_option("--proposal-count", tc.base.proposal_count, "candidates per proposal round");
  th->add_option("--proposal-rounds", tc.base.proposal_rounds, "proposal repetitions");
  th->add_option("--ascent-steps", tc.base.ascent_steps, "Adam steps per peak");
  th->add_option("--ascent-rate", tc.base.ascent_rate, "Adam step size");
  th->add_option("--exploration-fraction", tc.base.exploration_fraction,
                 "uniform share of proposals");
  th->add_option("--sgd-lr", tc.base.sgd_learning_rate, "SGD learning rate");
  th->add_option("--sgd-momentum", tc.base.sgd_momentum, "SGD momentum");
  th->add_option("--sgd-batch", tc.base.sgd_batch, "SGD batch size");
  th->add_option("--ap-block", tc.base.ap_block, "AP block size");
  th->add_option("--cg-rank", tc.base.cg_rank, "preconditioner rank");
  th->add_option("--out", tc.out_dir, "output directory");
  th->add_flag("--summary", summary, "print final-round summary statistics");

  // verify
  bool quick = false;
  std::uint64_t vseed = 0;
  auto* ver = app.add_subcommand("verify", "Randomized property suites; exit 0 iff all pass");
  ver->set_config("--config");
  ver->add_flag("--quick", quick, "5 systems instead of 50");
  ver->add_option("--seed", vseed, "suite seed");

  // make-data
  std::string preset = "pol", data_out = "pol.csv";
  Index rows = 4000, gen_dim = 8;
  std::uint64_t dseed = 1;
  auto* mk = app.add_subcommand("make-data",
                                "Generate a synthetic regression CSV (offline stand-in)");
  mk->set_config("--config");
  mk->add_option("--preset", preset, "pol, elevators or generic");
  mk->add_option("--rows", rows, "number of rows");
  mk->add_option("--dim", gen_dim, "feature count (generic preset only)");
  mk->add_option("--out", data_out, "output CSV path")->required();
  mk->add_option("--seed", dseed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (reg->parsed()) return cmd_regression_bench(rc, reg_solvers);
    if (th->parsed()) {
      if (samples_opt->count() > 0 && batch_opt->count() == 0) {
        tc.base.batch_size = tc.base.n_samples;  // one acquisition per sample
      }
      return cmd_thompson_bench(tc, th_solvers, th_inits, budget, summary);
    }
    if (ver->parsed()) return cmd_verify(quick, vseed);
    if (mk->parsed()) return cmd_make_data(preset, rows, gen_dim, data_out, dseed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
