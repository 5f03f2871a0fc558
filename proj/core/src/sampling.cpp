#include "warmgp/sampling.hpp"

#include <cmath>

#include "warmgp/rng.hpp"

namespace warmgp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kSqrt3 = 1.7320508075688772935;
}  // namespace

RffPrior sample_prior(const KernelHyperparams& hyp, Index dim, Index num_features,
                      std::uint64_t seed) {
  hyp.validate();
  if (dim < 1 || num_features < 1) {
    throw std::invalid_argument("sample_prior: dim and num_features must be positive");
  }
  Rng rng(seed);
  RffPrior p;
  p.signal_scale = hyp.signal_scale;
  p.frequencies.resize(num_features, dim);
  p.phases.resize(num_features);
  p.amplitudes.resize(num_features);
  for (Index i = 0; i < num_features; ++i) {
    // Student-t(3) rows: Gaussian over sqrt(chi^2_3 / 3), scaled by 1/l.
    const double u = rng.chi_square3();
    const double t_scale = std::sqrt(3.0 / u) / hyp.lengthscale;
    for (Index d = 0; d < dim; ++d) p.frequencies(i, d) = rng.normal() * t_scale;
    p.phases(i) = rng.uniform(0.0, kTwoPi);
    p.amplitudes(i) = rng.normal();
  }
  return p;
}

Vector eval_prior(const RffPrior& prior, const Matrix& X_star) {
  if (X_star.cols() != prior.dim()) {
    throw std::invalid_argument("eval_prior: dimension mismatch");
  }
  const double coeff =
      prior.signal_scale * std::sqrt(2.0 / static_cast<double>(prior.num_features()));
  Matrix phase = X_star * prior.frequencies.transpose();  // m x F
  phase.rowwise() += prior.phases.transpose();
  return coeff * (phase.array().cos().matrix() * prior.amplitudes);
}

Vector grad_prior(const RffPrior& prior, const Vector& x_star) {
  const double coeff =
      prior.signal_scale * std::sqrt(2.0 / static_cast<double>(prior.num_features()));
  Vector arg = prior.frequencies * x_star + prior.phases;
  const Vector s = arg.array().sin().matrix().cwiseProduct(prior.amplitudes);
  return -coeff * (prior.frequencies.transpose() * s);
}

Vector build_sample_rhs(const RffPrior& prior, const Matrix& X, double noise_scale,
                        std::uint64_t seed) {
  Vector rhs = eval_prior(prior, X);
  if (noise_scale > 0.0) {
    Rng rng(seed);
    for (Index i = 0; i < rhs.size(); ++i) rhs(i) += noise_scale * rng.normal();
  }
  return rhs;
}

Vector eval_posterior(const PosteriorSample& s, const Matrix& X_star) {
  if (s.weights.size() != s.X_train.rows()) {
    throw std::invalid_argument("eval_posterior: weights length != training rows");
  }
  Vector out = eval_prior(s.prior, X_star);
  if (s.X_train.rows() > 0) {
    out.noalias() += cross_kernel(X_star, s.X_train, s.hyperparams) * s.weights;
  }
  return out;
}

Vector grad_posterior(const PosteriorSample& s, const Vector& x_star) {
  Vector g = grad_prior(s.prior, x_star);
  const double l = s.hyperparams.lengthscale;
  const double c = 3.0 * s.hyperparams.signal_scale * s.hyperparams.signal_scale / (l * l);
  for (Index j = 0; j < s.X_train.rows(); ++j) {
    const Vector diff = s.X_train.row(j).transpose() - x_star;
    const double r = diff.norm();
    g.noalias() += (s.weights(j) * c * std::exp(-kSqrt3 * r / l)) * diff;
  }
  return g;
}

}  // namespace warmgp
