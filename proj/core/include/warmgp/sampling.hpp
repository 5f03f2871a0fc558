#pragma once

#include <cstdint>

#include "warmgp/kernel.hpp"
#include "warmgp/types.hpp"

namespace warmgp {

/// A realization of a GP prior sample as a random Fourier feature expansion:
///   f(x) = signal * sqrt(2/F) * sum_i w_i cos(omega_i . x + phi_i)
/// with frequencies drawn from the Matern-3/2 spectral density (Student-t
/// with 3 degrees of freedom, scaled by 1/lengthscale).
struct RffPrior {
  Matrix frequencies;  // F x D
  Vector phases;       // F, in [0, 2pi)
  Vector amplitudes;   // F, standard normal draws
  double signal_scale = 1.0;

  Index num_features() const { return frequencies.rows(); }
  Index dim() const { return frequencies.cols(); }
};

RffPrior sample_prior(const KernelHyperparams& hyp, Index dim, Index num_features,
                      std::uint64_t seed);

/// Evaluates the prior at the rows of X_star.
Vector eval_prior(const RffPrior& prior, const Matrix& X_star);

/// Gradient of the prior at a single point.
Vector grad_prior(const RffPrior& prior, const Vector& x_star);

/// f(X) + eps with eps ~ N(0, noise^2) i.i.d. per entry, deterministic per
/// seed. The right-hand side of a posterior sample system.
Vector build_sample_rhs(const RffPrior& prior, const Matrix& X, double noise_scale,
                        std::uint64_t seed);

/// A pathwise-conditioned posterior function sample: prior plus the
/// kernel-weighted representer correction.
struct PosteriorSample {
  RffPrior prior;
  Matrix X_train;
  Vector weights;
  KernelHyperparams hyperparams;
};

/// value(x*) = prior(x*) + K(x*, X_train) weights, evaluated at each row.
Vector eval_posterior(const PosteriorSample& s, const Matrix& X_star);

/// Analytic input gradient of eval_posterior at a single point; matches
/// central finite differences away from kinks (the Matern-3/2 term is C^1,
/// with zero gradient contribution exactly at a training point).
Vector grad_posterior(const PosteriorSample& s, const Vector& x_star);

}  // namespace warmgp
