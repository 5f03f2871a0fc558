#include "warmgp/bench/thompson.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "warmgp/rng.hpp"

namespace warmgp::bench {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_text(const ThompsonBenchConfig& cfg) {
  std::ostringstream os;
  os << "command=thompson-bench\n"
     << "dim=" << cfg.base.input_dim << "\nn_init=" << cfg.base.n_init
     << "\nsamples=" << cfg.base.n_samples << "\nbatch=" << cfg.base.batch_size
     << "\nrounds=" << cfg.base.n_rounds << "\nbudget_cg=" << cfg.base.budget.cg_iters
     << "\nbudget_sgd=" << cfg.base.budget.sgd_iters
     << "\nbudget_ap=" << cfg.base.budget.ap_iters << "\ntolerance=" << cfg.base.tolerance
     << "\nsignal_scale=" << cfg.base.signal_scale << "\nnoise_scale=" << cfg.base.noise_scale
     << "\nnum_features=" << cfg.base.num_features
     << "\nproposal_count=" << cfg.base.proposal_count
     << "\nproposal_rounds=" << cfg.base.proposal_rounds
     << "\nascent_steps=" << cfg.base.ascent_steps << "\nascent_rate=" << cfg.base.ascent_rate
     << "\nexploration_fraction=" << cfg.base.exploration_fraction
     << "\nsgd_learning_rate=" << cfg.base.sgd_learning_rate
     << "\nsgd_momentum=" << cfg.base.sgd_momentum << "\nsgd_batch=" << cfg.base.sgd_batch
     << "\nap_block=" << cfg.base.ap_block << "\ncg_rank=" << cfg.base.cg_rank
     << "\nseed_base=" << cfg.seed_base << "\nn_seeds=" << cfg.n_seeds << "\nlengthscales=";
  for (std::size_t i = 0; i < cfg.lengthscales.size(); ++i) {
    os << (i ? "," : "") << cfg.lengthscales[i];
  }
  os << "\nsolvers=";
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i) {
    os << (i ? "," : "") << method_name(cfg.solvers[i]);
  }
  os << "\ninits=";
  for (std::size_t i = 0; i < cfg.inits.size(); ++i) {
    os << (i ? "," : "") << init_mode_name(cfg.inits[i]);
  }
  os << "\n";
  return os.str();
}

}  // namespace

std::vector<ThompsonRun> run_thompson_bench(const ThompsonBenchConfig& cfg) {
  std::vector<ThompsonRun> runs;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string text = config_text(cfg);
    std::ofstream side(cfg.out_dir + "/thompson.config.txt");
    side << text << "config_hash=" << std::hex << fnv1a(text) << std::dec << "\n";
  }

  for (std::size_t li = 0; li < cfg.lengthscales.size(); ++li) {
    for (int si = 0; si < cfg.n_seeds; ++si) {
      // Shared across inits and solvers: matched objective and design.
      const std::uint64_t run_seed =
          derive_seed(cfg.seed_base, (li + 1) * 10000 + static_cast<std::uint64_t>(si));
      for (const InitMode mode : cfg.inits) {
        std::vector<const ThompsonRun*> file_runs;
        for (const Method solver : cfg.solvers) {
          BoConfig bo = cfg.base;
          bo.lengthscale = cfg.lengthscales[li];
          bo.init_mode = mode;
          bo.solver = solver;
          bo.seed = run_seed;

          ThompsonRun run;
          run.lengthscale = bo.lengthscale;
          run.seed = run_seed;
          run.init = mode;
          run.solver = solver;
          run.records = run_bo(bo);
          runs.push_back(std::move(run));
        }
        if (!cfg.out_dir.empty()) {
          for (std::size_t k = runs.size() - cfg.solvers.size(); k < runs.size(); ++k) {
            file_runs.push_back(&runs[k]);
          }
          std::ostringstream name;
          name << cfg.out_dir << "/thompson_l" << short_num(cfg.lengthscales[li]) << "_s" << si
               << "_" << init_mode_name(mode) << ".csv";
          write_thompson_csv(name.str(), file_runs);
        }
      }
    }
  }
  return runs;
}

void write_thompson_csv(const std::string& path, const std::vector<const ThompsonRun*>& runs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_thompson_csv: cannot open '" + path + "'");
  out << kThompsonCsvHeader << "\n";
  for (const ThompsonRun* run : runs) {
    for (const TrialRecord& rec : run->records) {
      out << rec.round << ',' << init_mode_name(run->init) << ',' << method_name(run->solver)
          << ',' << short_num(run->lengthscale) << ',' << run->seed << ','
          << fmt(rec.best_value) << ',' << fmt(rec.mean_residual) << ','
          << fmt(rec.avg_sample_residual) << ',' << fmt(rec.wall_clock_s) << "\n";
    }
  }
}

}  // namespace warmgp::bench
