#pragma once

#include <string>
#include <vector>

#include "warmgp/thompson.hpp"

namespace warmgp::bench {

struct ThompsonBenchConfig {
  BoConfig base;  // dim, n_init, samples, rounds, budget, tolerance, knobs
  std::vector<double> lengthscales = {0.1, 0.2, 0.3, 0.4, 0.5};
  int n_seeds = 2;
  std::uint64_t seed_base = 0;
  std::vector<Method> solvers = {Method::CG, Method::SGD, Method::AP};
  std::vector<InitMode> inits = {InitMode::Warm, InitMode::Cold};
  std::string out_dir;  // empty: in-memory only
};

struct ThompsonRun {
  double lengthscale = 0.0;
  std::uint64_t seed = 0;
  InitMode init = InitMode::Cold;
  Method solver = Method::CG;
  std::vector<TrialRecord> records;
};

inline constexpr const char* kThompsonCsvHeader =
    "round,init,solver,lengthscale,seed,best_value,mean_residual,"
    "avg_sample_residual,wall_clock_s";

/// Runs every (lengthscale, seed, init, solver) combination. Warm and cold
/// runs with the same lengthscale and seed share the objective function and
/// the initial design, so they form matched pairs. One CSV file is written
/// per (lengthscale, seed, init), with a row per (round, solver).
std::vector<ThompsonRun> run_thompson_bench(const ThompsonBenchConfig& cfg);

void write_thompson_csv(const std::string& path, const std::vector<const ThompsonRun*>& runs);

}  // namespace warmgp::bench
