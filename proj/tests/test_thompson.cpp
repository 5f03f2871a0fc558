#include <cmath>

#include "doctest.h"
#include "testutil.hpp"
#include "warmgp/thompson.hpp"

using namespace warmgp;

namespace {

// Small configuration for fast loop tests.
BoConfig tiny_config() {
  BoConfig cfg;
  cfg.input_dim = 2;
  cfg.n_init = 60;
  cfg.n_samples = 4;
  cfg.batch_size = 4;
  cfg.n_rounds = 2;
  cfg.lengthscale = 0.3;
  cfg.num_features = 128;
  cfg.proposal_count = 50;
  cfg.proposal_rounds = 2;
  cfg.ascent_steps = 5;
  cfg.sgd_batch = 20;
  cfg.ap_block = 20;
  cfg.cg_rank = 20;
  cfg.seed = 99;
  return cfg;
}

}  // namespace

TEST_CASE("make_objective") {
  const KernelHyperparams hyp{0.3, 1.0, 1e-3};
  SUBCASE("same seed gives the same function") {
    Objective a = make_objective(3, hyp, 5);
    Objective b = make_objective(3, hyp, 5);
    const Matrix probes = test::uniform_inputs(1, 10, 3);
    for (Index i = 0; i < probes.rows(); ++i) {
      CHECK(a.value(probes.row(i).transpose()) == b.value(probes.row(i).transpose()));
    }
  }
  SUBCASE("observation noise has the configured scale") {
    Objective obj = make_objective(3, hyp, 6);
    Vector x(3);
    x << 0.2, 0.5, 0.8;
    const double truth = obj.value(x);
    double sum2 = 0.0;
    const int reps = 400;
    for (int i = 0; i < reps; ++i) {
      const double e = obj.observe(x) - truth;
      sum2 += e * e;
    }
    CHECK(std::sqrt(sum2 / reps) == doctest::Approx(1e-3).epsilon(0.3));
  }
  SUBCASE("function values have roughly unit scale") {
    Objective obj = make_objective(3, hyp, 7);
    const Matrix probes = test::uniform_inputs(2, 10000, 3);
    double sum = 0.0, sum2 = 0.0;
    for (Index i = 0; i < probes.rows(); ++i) {
      const double v = obj.value(probes.row(i).transpose());
      sum += v;
      sum2 += v * v;
    }
    const double mean = sum / probes.rows();
    const double sd = std::sqrt(sum2 / probes.rows() - mean * mean);
    CHECK(sd == doctest::Approx(1.0).epsilon(0.3));
  }
}

TEST_CASE("init_design") {
  SUBCASE("points stay inside the unit cube") {
    const Matrix X = init_design(5, 200, 3);
    CHECK(X.minCoeff() >= 0.0);
    CHECK(X.maxCoeff() < 1.0);
  }
  SUBCASE("single point") { CHECK(init_design(4, 1, 0).rows() == 1); }
  SUBCASE("deterministic per seed") {
    CHECK(init_design(3, 50, 11) == init_design(3, 50, 11));
    CHECK(init_design(3, 50, 11) != init_design(3, 50, 12));
  }
  SUBCASE("more even coverage than i.i.d. uniform sampling") {
    // Compare the spread of nearest-neighbor distances.
    const auto nn_cv = [](const Matrix& X) {
      const Index n = X.rows();
      double sum = 0.0, sum2 = 0.0;
      for (Index i = 0; i < n; ++i) {
        double best = 1e9;
        for (Index j = 0; j < n; ++j) {
          if (i == j) continue;
          best = std::min(best, (X.row(i) - X.row(j)).norm());
        }
        sum += best;
        sum2 += best * best;
      }
      const double mean = sum / n;
      return std::sqrt(sum2 / n - mean * mean) / mean;
    };
    const double halton_cv = nn_cv(init_design(3, 500, 21));
    double uniform_cv = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      uniform_cv += nn_cv(test::uniform_inputs(400 + rep, 500, 3));
    }
    CHECK(halton_cv < uniform_cv / 10.0);
  }
}

TEST_CASE("propose_candidates") {
  BoState state;
  state.X_obs = test::uniform_inputs(31, 40, 2);
  state.y_obs = test::gaussian_vector(32, 40);

  SUBCASE("rows in bounds and exact count") {
    const Matrix c = propose_candidates(state, 1000, 0.2, 0.1, 1.0, 7);
    CHECK(c.rows() == 1000);
    CHECK(c.minCoeff() >= 0.0);
    CHECK(c.maxCoeff() <= 1.0);
  }
  SUBCASE("full exploration ignores the observations") {
    const Matrix a = propose_candidates(state, 64, 0.2, 1.0, 1.0, 8);
    BoState other = state;
    other.y_obs = test::gaussian_vector(33, 40);  // different scores
    const Matrix b = propose_candidates(other, 64, 0.2, 1.0, 1.0, 8);
    CHECK(a == b);
  }
  SUBCASE("vanishing temperature anchors every exploit point at the argmax") {
    Index best = 0;
    state.y_obs.maxCoeff(&best);
    const double l = 0.1;
    const Matrix c = propose_candidates(state, 200, l, 0.0, 1e-13, 9);
    for (Index i = 0; i < c.rows(); ++i) {
      // Perturbations have std l/2 per coordinate; 8 sigma covers fixed seeds.
      CHECK((c.row(i) - state.X_obs.row(best)).norm() < 8.0 * (l / 2.0) * std::sqrt(2.0));
    }
  }
  SUBCASE("empty state throws") {
    BoState empty;
    empty.X_obs = Matrix(0, 2);
    empty.y_obs = Vector(0);
    CHECK_THROWS_AS(propose_candidates(empty, 10, 0.2, 0.1, 1.0, 0), std::invalid_argument);
  }
}

TEST_CASE("select_peaks") {
  const BoConfig cfg = tiny_config();
  BoState state;
  state.X_obs = test::uniform_inputs(41, 30, 2);
  state.y_obs = test::gaussian_vector(42, 30);
  const KernelHyperparams hyp = cfg.hyp();

  std::vector<PosteriorSample> samples;
  for (int s = 0; s < 3; ++s) {
    samples.push_back(PosteriorSample{sample_prior(hyp, 2, 64, 50 + s), state.X_obs,
                                      test::gaussian_vector(60 + s, 30), hyp});
  }

  SUBCASE("output shape is samples x repetitions x dim") {
    const auto peaks = select_peaks(samples, state, 3, 100, cfg, 70);
    REQUIRE(peaks.size() == 3);
    for (const auto& m : peaks) {
      CHECK(m.rows() == 3);
      CHECK(m.cols() == 2);
    }
  }
  SUBCASE("each recorded peak maximizes its sample over that repetition's candidates") {
    const auto peaks = select_peaks(samples, state, 2, 80, cfg, 71);
    for (int rep = 0; rep < 2; ++rep) {
      const Matrix cands = propose_candidates(state, 80, cfg.lengthscale,
                                              cfg.exploration_fraction,
                                              cfg.anchor_temperature_scale,
                                              derive_seed(71, rep));
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const Vector vals = eval_posterior(samples[s], cands);
        Matrix peak(1, 2);
        peak.row(0) = peaks[s].row(rep);
        const double peak_val = eval_posterior(samples[s], peak)(0);
        CHECK(peak_val >= vals.maxCoeff() - 1e-12);
      }
    }
  }
  SUBCASE("single candidate is everyone's peak") {
    const auto peaks = select_peaks(samples, state, 1, 1, cfg, 72);
    const Matrix cand = propose_candidates(state, 1, cfg.lengthscale, cfg.exploration_fraction,
                                           cfg.anchor_temperature_scale, derive_seed(72, 0));
    for (const auto& m : peaks) CHECK(m.row(0) == cand.row(0));
  }
}

TEST_CASE("ascend_peaks") {
  const KernelHyperparams hyp{0.25, 1.0, 1e-3};
  // A single positive representer weight makes the posterior a radial bump
  // peaked exactly at the training point.
  Matrix x0(1, 2);
  x0 << 0.43, 0.57;
  RffPrior silent = sample_prior(hyp, 2, 16, 80);
  silent.amplitudes.setZero();
  PosteriorSample bump{silent, x0, Vector::Constant(1, 2.0), hyp};

  Matrix starts(3, 2);
  starts << 0.35, 0.5, 0.5, 0.62, 0.41, 0.55;

  SUBCASE("zero steps return the best initial peak") {
    const AscendResult res = ascend_peaks({bump}, {starts}, 0, 0.02, 0);
    Index best = 0;
    Vector vals(3);
    for (Index i = 0; i < 3; ++i) {
      Matrix p(1, 2);
      p.row(0) = starts.row(i);
      vals(i) = eval_posterior(bump, p)(0);
    }
    vals.maxCoeff(&best);
    CHECK(res.points.row(0) == starts.row(best));
  }
  SUBCASE("ascent climbs to the analytic maximizer") {
    const AscendResult res = ascend_peaks({bump}, {starts}, 200, 0.01, 0);
    Matrix peak(1, 2);
    peak.row(0) = x0.row(0);
    const double max_val = eval_posterior(bump, peak)(0);
    CHECK((res.points.row(0) - x0.row(0)).norm() < 1e-2);
    CHECK(res.values(0) >= max_val - 1e-3);

    // Never worse than the best starting point.
    Vector vals(3);
    for (Index i = 0; i < 3; ++i) {
      Matrix p(1, 2);
      p.row(0) = starts.row(i);
      vals(i) = eval_posterior(bump, p)(0);
    }
    CHECK(res.values(0) >= vals.maxCoeff());
  }
}

TEST_CASE("bo_round bookkeeping") {
  BoConfig cfg = tiny_config();

  SUBCASE("records a full round and acquires the batch") {
    BoState state = bo_init(cfg);
    CHECK(state.n_obs() == 60);
    const TrialRecord rec = bo_round(state, cfg);
    CHECK(rec.round == 1);
    CHECK(state.n_obs() == 64);
    CHECK(state.n_solved == 60);
    CHECK(state.mean_weights.size() == 60);
    CHECK(state.sample_weights.rows() == 60);
    CHECK(rec.mean_iterations <= cfg.budget.iters_for(cfg.solver));
    CHECK(std::isfinite(rec.mean_residual));
    CHECK(state.X_obs.bottomRows(4).minCoeff() >= 0.0);
    CHECK(state.X_obs.bottomRows(4).maxCoeff() <= 1.0);
  }
  SUBCASE("warm-start weights carry the previous round verbatim") {
    BoState state = bo_init(cfg);
    bo_round(state, cfg);
    const Vector before = state.mean_weights;
    const Matrix samples_before = state.sample_weights;

    BoConfig frozen = cfg;
    frozen.budget = BoBudget{0, 0, 0};  // zero-iteration solve keeps the inits
    bo_round(state, frozen);
    REQUIRE(state.mean_weights.size() == 64);
    CHECK(state.mean_weights.head(60) == before);
    CHECK(state.mean_weights.tail(4).cwiseAbs().maxCoeff() == 0.0);
    for (Index s = 0; s < cfg.n_samples; ++s) {
      CHECK(state.sample_weights.col(s).head(60) == samples_before.col(s));
      CHECK(state.sample_weights.col(s).tail(4).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("cold mode resets the weights each round") {
    BoConfig cold = tiny_config();
    cold.init_mode = InitMode::Cold;
    BoState state = bo_init(cold);
    bo_round(state, cold);
    BoConfig frozen = cold;
    frozen.budget = BoBudget{0, 0, 0};
    bo_round(state, frozen);
    CHECK(state.mean_weights.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("run_bo") {
  BoConfig cfg = tiny_config();

  SUBCASE("zero rounds emit only the initial record") {
    cfg.n_rounds = 0;
    const auto recs = run_bo(cfg);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].round == 0);
    CHECK(std::isnan(recs[0].mean_residual));
  }
  SUBCASE("best value never decreases") {
    cfg.n_rounds = 3;
    const auto recs = run_bo(cfg);
    REQUIRE(recs.size() == 4);
    for (std::size_t i = 1; i < recs.size(); ++i) {
      CHECK(recs[i].best_value >= recs[i - 1].best_value);
    }
  }
  SUBCASE("paired warm and cold runs share the objective and initial design") {
    BoConfig warm = cfg;
    warm.init_mode = InitMode::Warm;
    BoConfig cold = cfg;
    cold.init_mode = InitMode::Cold;
    const auto rw = run_bo(warm);
    const auto rc = run_bo(cold);
    CHECK(rw[0].best_value == rc[0].best_value);
    // Round one solves from zero in both modes, so the records coincide.
    CHECK(rw[1].best_value == rc[1].best_value);
    CHECK(rw[1].mean_residual == rc[1].mean_residual);
  }
  SUBCASE("budgets cap every recorded solve") {
    for (const Method m : {Method::CG, Method::SGD, Method::AP}) {
      BoConfig budgeted = cfg;
      budgeted.solver = m;
      budgeted.n_rounds = 2;
      budgeted.tolerance = 0.0;  // force the cap to bind
      const auto recs = run_bo(budgeted);
      for (std::size_t i = 1; i < recs.size(); ++i) {
        CHECK(recs[i].mean_iterations <= budgeted.budget.iters_for(m));
        CHECK(recs[i].max_sample_iterations <= budgeted.budget.iters_for(m));
        CHECK(recs[i].mean_iterations > 0);
      }
      if (m == Method::CG) {
        // CG never trips the divergence guard, so the cap binds exactly.
        for (std::size_t i = 1; i < recs.size(); ++i) {
          CHECK(recs[i].mean_iterations == budgeted.budget.iters_for(m));
        }
      }
    }
  }
  SUBCASE("sgd divergence is recorded and the run continues") {
    BoConfig unstable = cfg;
    unstable.solver = Method::SGD;
    unstable.sgd_learning_rate = 50.0;
    unstable.n_rounds = 2;
    const auto recs = run_bo(unstable);
    CHECK(recs.size() == 3);
    for (const auto& r : recs) CHECK(std::isfinite(r.best_value));
  }
}

TEST_CASE("budget presets carry the published iteration caps") {
  const BoBudget small = BoBudget::small();
  CHECK(small.iters_for(Method::CG) == 5);
  CHECK(small.iters_for(Method::SGD) == 120);
  CHECK(small.iters_for(Method::AP) == 30);
  const BoBudget large = BoBudget::large();
  CHECK(large.iters_for(Method::CG) == 25);
  CHECK(large.iters_for(Method::SGD) == 600);
  CHECK(large.iters_for(Method::AP) == 150);
}

TEST_CASE("BoConfig validation") {
  BoConfig cfg = tiny_config();
  cfg.batch_size = cfg.n_samples + 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
