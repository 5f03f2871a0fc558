#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "warmgp/kernel.hpp"
#include "warmgp/rng.hpp"

namespace warmgp::bench {

/// Uniform inputs in [0,1]^dim.
Matrix random_inputs(Rng& rng, Index n, Index dim);

/// Hyperparameters drawn log-uniformly from ranges that keep desk-scale
/// Matern systems comfortably factorizable in double precision.
KernelHyperparams random_hyperparams(Rng& rng);

/// A random Matern blocked system with standard-normal right-hand sides.
BlockedSystem random_blocked_system(Rng& rng, Index n1_lo, Index n1_hi, Index n2_lo,
                                    Index n2_hi);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double measured = 0.0;  // worst observed value
  double bound = 0.0;     // what it must stay within
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const;
};

struct VerifyOptions {
  bool quick = false;  // 5 systems instead of 50
  std::uint64_t seed = 0;
};

/// Randomized property suites: warm-start distance identity, Schur
/// consistency, solver-versus-oracle agreement, random-feature covariance
/// fidelity, and MLL gradient checks.
VerifyReport run_verify(const VerifyOptions& opt);

void print_verify_report(const VerifyReport& report, std::ostream& os);

}  // namespace warmgp::bench
