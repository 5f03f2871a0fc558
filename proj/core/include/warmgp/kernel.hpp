#pragma once

#include "warmgp/types.hpp"

namespace warmgp {

/// Matern-3/2 kernel hyperparameters. All three scales are strictly positive.
struct KernelHyperparams {
  double lengthscale = 1.0;
  double signal_scale = 1.0;
  double noise_scale = 1e-3;

  void validate() const;
};

/// k(x, x') = s^2 (1 + sqrt(3) r / l) exp(-sqrt(3) r / l), r = |x - x'|_2.
double matern32(const Vector& x, const Vector& x_prime, const KernelHyperparams& hyp);

/// Matern-3/2 applied to a precomputed distance.
double matern32_from_distance(double r, const KernelHyperparams& hyp);

/// Derivative of matern32 with respect to x (not x'). Well defined at r = 0
/// where it vanishes.
Vector matern32_grad(const Vector& x, const Vector& x_prime, const KernelHyperparams& hyp);

/// Dense covariance matrix H = K(X, X) + noise^2 I together with the inputs
/// and hyperparameters it was built from.
struct CovarianceMatrix {
  Matrix H;
  KernelHyperparams hyperparams;
  Matrix X;

  Index size() const { return H.rows(); }
};

/// Builds the covariance matrix of X. The result is exactly symmetric and
/// has diagonal signal^2 + noise^2.
CovarianceMatrix gram_matrix(const Matrix& X, const KernelHyperparams& hyp);

/// Cross-kernel block K(X_star, X) with no noise term.
Matrix cross_kernel(const Matrix& X_star, const Matrix& X, const KernelHyperparams& hyp);

/// Pairwise Euclidean distances between rows of A and rows of B, clamped at
/// zero to absorb floating-point cancellation.
Matrix pairwise_distances(const Matrix& A, const Matrix& B);

/// The covariance system of [X1; X2] in block form, with the upper-left
/// block carried over verbatim from a previously assembled system.
struct BlockedSystem {
  Matrix H11;  // n1 x n1
  Matrix H12;  // n1 x n2
  Matrix H22;  // n2 x n2
  Vector b1;
  Vector b2;

  Index n1() const { return H11.rows(); }
  Index n2() const { return H22.rows(); }

  /// [[H11, H12], [H12^T, H22]]
  Matrix assembled() const;
  /// [b1; b2]
  Vector rhs() const;
};

/// Extends `prev` with n2 new rows X2: H11 is reused without recomputation,
/// H12 and H22 are evaluated fresh, and the right-hand side is [b1; b2].
BlockedSystem extend_system(const CovarianceMatrix& prev, const Matrix& X2,
                            const Vector& b1, const Vector& b2);

}  // namespace warmgp
