#pragma once

#include "warmgp/kernel.hpp"
#include "warmgp/types.hpp"

namespace warmgp {

/// Direct Cholesky solve of an SPD system. Throws NotSpdError if the
/// factorization fails.
Vector exact_solve(const Matrix& H, const Vector& b);

/// sqrt((v_exact - v_init)^T H (v_exact - v_init)).
double rkhs_distance(const Matrix& H, const Vector& v_init, const Vector& v_exact);

double euclidean_distance(const Vector& v_init, const Vector& v_exact);

/// S = H22 - H12^T H11^{-1} H12. SPD whenever the full blocked matrix is.
Matrix schur_complement(const BlockedSystem& sys);

/// Initial-distance diagnostics of a blocked system: how much closer the
/// warm start [u1; 0] sits to the exact solution than the zero start, in
/// both norms, plus the closed-form bookkeeping gap
///   identity_gap = d_cold^2 - d_warm^2 - b1^T H11^{-1} b1
/// which vanishes in exact arithmetic.
struct DistanceReport {
  double d_euclid_cold = 0.0;
  double d_euclid_warm = 0.0;
  double d_cold_sq = 0.0;  // squared RKHS distance of the zero start
  double d_warm_sq = 0.0;  // squared RKHS distance of the warm start
  double identity_gap = 0.0;

  double d_rkhs_cold() const;
  double d_rkhs_warm() const;
  double euclid_ratio() const { return d_euclid_warm / d_euclid_cold; }
  double rkhs_ratio() const;
};

DistanceReport warm_start_report(const BlockedSystem& sys);

/// Marginal log-likelihood of a zero-mean GP with Matern-3/2 kernel, and its
/// gradient with respect to (log lengthscale, log signal, log noise).
struct MllResult {
  double value = 0.0;
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
};

MllResult mll(const Matrix& X, const Vector& y, const KernelHyperparams& hyp);

/// Adam ascent on the log-parameters. Returns the best parameters seen, so
/// the result never has lower MLL than the starting point. Throws on
/// non-finite MLL values.
KernelHyperparams optimize_mll(const Matrix& X, const Vector& y, const KernelHyperparams& init_hyp,
                               int steps, double step_size);

/// Median pairwise distance of (a subsample of) X; a customary lengthscale
/// initialization for MLL fitting.
double median_heuristic_lengthscale(const Matrix& X, std::uint64_t seed = 0);

}  // namespace warmgp
