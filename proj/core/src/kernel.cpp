#include "warmgp/kernel.hpp"

#include <cmath>

namespace warmgp {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935;
}

void KernelHyperparams::validate() const {
  if (!(lengthscale > 0.0) || !(signal_scale > 0.0) || !(noise_scale > 0.0)) {
    throw std::invalid_argument("kernel hyperparameters must be strictly positive");
  }
}

double matern32_from_distance(double r, const KernelHyperparams& hyp) {
  if (r < 0.0) r = 0.0;
  const double z = kSqrt3 * r / hyp.lengthscale;
  return hyp.signal_scale * hyp.signal_scale * (1.0 + z) * std::exp(-z);
}

double matern32(const Vector& x, const Vector& x_prime, const KernelHyperparams& hyp) {
  if (x.size() != x_prime.size()) {
    throw std::invalid_argument("matern32: dimension mismatch");
  }
  return matern32_from_distance((x - x_prime).norm(), hyp);
}

Vector matern32_grad(const Vector& x, const Vector& x_prime, const KernelHyperparams& hyp) {
  // d/dx k = -(3 s^2 / l^2) exp(-sqrt(3) r / l) (x - x'); smooth at r = 0.
  const double r = (x - x_prime).norm();
  const double l = hyp.lengthscale;
  const double c = -3.0 * hyp.signal_scale * hyp.signal_scale / (l * l) *
                   std::exp(-kSqrt3 * r / l);
  return c * (x - x_prime);
}

Matrix pairwise_distances(const Matrix& A, const Matrix& B) {
  const Vector a2 = A.rowwise().squaredNorm();
  const Vector b2 = B.rowwise().squaredNorm();
  Matrix d2 = (-2.0 * A * B.transpose());
  d2.colwise() += a2;
  d2.rowwise() += b2.transpose();
  return d2.cwiseMax(0.0).cwiseSqrt();
}

CovarianceMatrix gram_matrix(const Matrix& X, const KernelHyperparams& hyp) {
  hyp.validate();
  const Index n = X.rows();
  if (n < 1) throw std::invalid_argument("gram_matrix: need at least one row");

  // Squared distances via a rank update keep the matrix exactly symmetric.
  Matrix g = Matrix::Zero(n, n);
  g.selfadjointView<Eigen::Lower>().rankUpdate(X);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();

  const Vector sq = g.diagonal();
  const double s2 = hyp.signal_scale * hyp.signal_scale;
  const double inv_l = kSqrt3 / hyp.lengthscale;

  Matrix H(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double d2 = sq(i) + sq(j) - 2.0 * g(i, j);
      const double z = inv_l * std::sqrt(d2 > 0.0 ? d2 : 0.0);
      H(i, j) = s2 * (1.0 + z) * std::exp(-z);
    }
  }
  H.diagonal().array() = s2 + hyp.noise_scale * hyp.noise_scale;
  return CovarianceMatrix{std::move(H), hyp, X};
}

Matrix cross_kernel(const Matrix& X_star, const Matrix& X, const KernelHyperparams& hyp) {
  hyp.validate();
  if (X_star.cols() != X.cols()) {
    throw std::invalid_argument("cross_kernel: dimension mismatch");
  }
  const double s2 = hyp.signal_scale * hyp.signal_scale;
  const double inv_l = kSqrt3 / hyp.lengthscale;
  Matrix K = pairwise_distances(X_star, X);
  for (Index j = 0; j < K.cols(); ++j) {
    for (Index i = 0; i < K.rows(); ++i) {
      const double z = inv_l * K(i, j);
      K(i, j) = s2 * (1.0 + z) * std::exp(-z);
    }
  }
  return K;
}

Matrix BlockedSystem::assembled() const {
  const Index n = n1() + n2();
  Matrix H(n, n);
  H.topLeftCorner(n1(), n1()) = H11;
  H.topRightCorner(n1(), n2()) = H12;
  H.bottomLeftCorner(n2(), n1()) = H12.transpose();
  H.bottomRightCorner(n2(), n2()) = H22;
  return H;
}

Vector BlockedSystem::rhs() const {
  Vector b(n1() + n2());
  b.head(n1()) = b1;
  b.tail(n2()) = b2;
  return b;
}

BlockedSystem extend_system(const CovarianceMatrix& prev, const Matrix& X2,
                            const Vector& b1, const Vector& b2) {
  const Index n1 = prev.size();
  const Index n2 = X2.rows();
  if (b1.size() != n1) throw std::invalid_argument("extend_system: b1 length != n1");
  if (b2.size() != n2) throw std::invalid_argument("extend_system: b2 length != n2");
  if (n2 > 0 && X2.cols() != prev.X.cols()) {
    throw std::invalid_argument("extend_system: feature dimension mismatch");
  }

  BlockedSystem sys;
  sys.H11 = prev.H;
  sys.b1 = b1;
  sys.b2 = b2;
  if (n2 == 0) {
    sys.H12 = Matrix(n1, 0);
    sys.H22 = Matrix(0, 0);
    return sys;
  }
  sys.H12 = cross_kernel(prev.X, X2, prev.hyperparams);
  sys.H22 = gram_matrix(X2, prev.hyperparams).H;
  return sys;
}

}  // namespace warmgp
