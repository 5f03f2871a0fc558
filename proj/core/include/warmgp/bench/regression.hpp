#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "warmgp/analysis.hpp"
#include "warmgp/dataset.hpp"
#include "warmgp/solvers.hpp"
#include "warmgp/thompson.hpp"  // InitMode

namespace warmgp::bench {

struct RegressionConfig {
  std::string data_path;
  Index target_column = -1;  // negative: last column
  bool has_header = false;
  Index n1 = 1000;
  Index n2 = 100;
  int trials = 10;
  double tolerance = 0.01;
  std::vector<Method> solvers = {Method::CG, Method::SGD, Method::AP};
  std::string out_dir;  // empty: keep rows in memory only
  std::uint64_t seed = 0;

  int mll_steps = 200;
  double mll_rate = 0.1;
  Index num_features = 2000;

  double sgd_learning_rate = 0.0;  // 0: pick from sgd_grid on a probe system
  std::vector<double> sgd_grid = {0.03, 0.1, 0.3, 1.0};
  double sgd_momentum = 0.9;
  Index sgd_batch = 100;
  SgdScaling sgd_scaling = SgdScaling::Unbiased;
  Index ap_block = 100;
  Index cg_rank = 100;
  int cg_max_iters = 2000;
  int sgd_max_iters = 30000;
  int ap_max_iters = 5000;
};

/// One CSV row: a single solve of one trial's extended system.
struct RegressionRow {
  int trial = 0;
  Method solver = Method::CG;
  std::string system;  // "mean" | "sample"
  InitMode init = InitMode::Cold;
  int iters = 0;
  bool converged = false;
  double final_rel_residual = 0.0;
  double d_euclid_ratio = 1.0;  // this init's distance over the cold distance
  double d_rkhs_ratio = 1.0;
  double identity_gap = 0.0;
  std::uint64_t seed = 0;
};

struct RegressionOutcome {
  std::vector<RegressionRow> rows;
  double chosen_sgd_lr = 0.0;
  std::string dataset_name;
};

inline constexpr const char* kRegressionCsvHeader =
    "trial,solver,system,init,iters,converged,final_rel_residual,"
    "d_euclid_ratio,d_rkhs_ratio,identity_gap,seed";

/// Runs the full protocol on an already standardized dataset: per trial, fit
/// hyperparameters on the n1 subsample, solve the small system exactly,
/// extend by n2 points, and run every configured solver warm and cold on the
/// posterior-mean and posterior-sample systems.
RegressionOutcome run_regression_bench(const RegressionConfig& cfg, const Dataset& standardized);

/// Loads cfg.data_path, standardizes, runs, and (if out_dir is set) writes
/// `regression_<name>.csv` plus a config sidecar.
RegressionOutcome run_regression_bench(const RegressionConfig& cfg);

void write_regression_csv(const std::string& path, const std::vector<RegressionRow>& rows);

}  // namespace warmgp::bench
