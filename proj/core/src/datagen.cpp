#include "warmgp/bench/datagen.hpp"

#include <cstdio>
#include <fstream>

#include "warmgp/analysis.hpp"
#include "warmgp/rng.hpp"
#include "warmgp/sampling.hpp"

namespace warmgp::bench {

Dataset make_synthetic_dataset(const std::string& preset, Index rows, Index dim,
                               std::uint64_t seed) {
  if (preset == "pol") {
    dim = 26;
  } else if (preset == "elevators") {
    dim = 18;
  } else if (preset != "generic") {
    throw std::invalid_argument("make_synthetic_dataset: unknown preset '" + preset +
                                "' (expected pol, elevators or generic)");
  }
  if (rows < 4 || dim < 1) {
    throw std::invalid_argument("make_synthetic_dataset: need rows >= 4 and dim >= 1");
  }

  Rng rng(derive_seed(seed, 0xda7a));

  // Features concentrated near a low-dimensional latent manifold, like most
  // sensor-style regression tables, then uneven affine scaling so
  // standardization has work to do.
  const Index latent = std::max<Index>(2, dim / 6);
  Matrix mix(latent, dim);
  for (Index i = 0; i < latent; ++i) {
    for (Index j = 0; j < dim; ++j) mix(i, j) = rng.normal();
  }
  Matrix Z(rows, latent);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < latent; ++j) Z(i, j) = rng.normal();
  }
  Matrix X = Z * mix;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < dim; ++j) X(i, j) += 0.1 * rng.normal();
  }
  for (Index j = 0; j < dim; ++j) {
    const double scale = std::exp(rng.uniform(-1.0, 2.5));
    const double offset = rng.uniform(-5.0, 5.0);
    X.col(j) = X.col(j).array() * scale + offset;
  }

  // Target: an exact Matern GP sample over the standardized features (dense
  // Cholesky of the full kernel) plus observation noise.
  Dataset d;
  d.X = X;
  d.y = Vector::Zero(rows);
  d.name = preset == "generic" ? "synthetic" : preset;
  auto [ds, params] = standardize(d);
  (void)params;

  const double ls = 0.2 * median_heuristic_lengthscale(ds.X, derive_seed(seed, 0x11));
  const KernelHyperparams hyp{ls, 1.0, 1e-4};
  Matrix K = gram_matrix(ds.X, hyp).H;  // the 1e-4 noise doubles as jitter
  const Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("make_synthetic_dataset: sampling factorization failed");
  }
  Rng yrng(derive_seed(seed, 0x22));
  Vector z(rows);
  for (Index i = 0; i < rows; ++i) z(i) = yrng.normal();
  Vector y = llt.matrixL() * z;
  for (Index i = 0; i < rows; ++i) y(i) += 0.2 * yrng.normal();
  // Arbitrary output units so the target also needs standardizing.
  d.y = y.array() * 7.3 + 42.0;
  return d;
}

void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  char buf[32];
  for (Index i = 0; i < d.size(); ++i) {
    for (Index j = 0; j < d.dim(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", d.X(i, j));
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", d.y(i));
    out << buf << '\n';
  }
}

}  // namespace warmgp::bench
