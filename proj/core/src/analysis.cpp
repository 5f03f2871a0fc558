#include "warmgp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "warmgp/rng.hpp"

namespace warmgp {

namespace {
constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::LLT<Matrix> factor_spd(const Matrix& H, const char* who) {
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) {
    throw NotSpdError(std::string(who) + ": Cholesky factorization failed (matrix not SPD)");
  }
  return llt;
}
}  // namespace

Vector exact_solve(const Matrix& H, const Vector& b) {
  return factor_spd(H, "exact_solve").solve(b);
}

double rkhs_distance(const Matrix& H, const Vector& v_init, const Vector& v_exact) {
  const Vector e = v_exact - v_init;
  const double q = e.dot(H * e);
  return std::sqrt(std::max(q, 0.0));
}

double euclidean_distance(const Vector& v_init, const Vector& v_exact) {
  if (v_init.size() != v_exact.size()) {
    throw std::invalid_argument("euclidean_distance: length mismatch");
  }
  return (v_exact - v_init).norm();
}

Matrix schur_complement(const BlockedSystem& sys) {
  const auto llt11 = factor_spd(sys.H11, "schur_complement");
  return sys.H22 - sys.H12.transpose() * llt11.solve(sys.H12);
}

double DistanceReport::d_rkhs_cold() const { return std::sqrt(std::max(d_cold_sq, 0.0)); }
double DistanceReport::d_rkhs_warm() const { return std::sqrt(std::max(d_warm_sq, 0.0)); }
double DistanceReport::rkhs_ratio() const { return d_rkhs_warm() / d_rkhs_cold(); }

DistanceReport warm_start_report(const BlockedSystem& sys) {
  const Matrix H = sys.assembled();
  const Vector b = sys.rhs();
  const auto llt = factor_spd(H, "warm_start_report");
  const auto llt11 = factor_spd(sys.H11, "warm_start_report(H11)");

  const Vector v_exact = llt.solve(b);
  const Vector u1 = llt11.solve(sys.b1);
  Vector v_warm = Vector::Zero(b.size());
  v_warm.head(sys.n1()) = u1;

  DistanceReport rep;
  rep.d_euclid_cold = v_exact.norm();
  rep.d_euclid_warm = (v_exact - v_warm).norm();

  // Cold squared distance through the residual form b^T H^{-1} b.
  rep.d_cold_sq = b.dot(v_exact);

  // Warm squared distance twice over: directly as the quadratic form, and
  // through the Schur-reduced residual. The reported gap is the worse of
  // the two, so a derivation bug in either route shows up.
  const Vector e = v_exact - v_warm;
  const double warm_direct = e.dot(H * e);
  const Vector r2 = sys.b2 - sys.H12.transpose() * u1;
  const Matrix S = sys.H22 - sys.H12.transpose() * llt11.solve(sys.H12);
  double warm_schur = warm_direct;
  if (sys.n2() > 0) {
    const auto llt_s = factor_spd(S, "warm_start_report(schur)");
    warm_schur = r2.dot(llt_s.solve(r2));
  }
  rep.d_warm_sq = warm_direct;

  const double reduction = sys.b1.dot(u1);  // b1^T H11^{-1} b1
  const double gap_direct = rep.d_cold_sq - warm_direct - reduction;
  const double gap_schur = rep.d_cold_sq - warm_schur - reduction;
  rep.identity_gap = std::abs(gap_direct) >= std::abs(gap_schur) ? gap_direct : gap_schur;
  return rep;
}

namespace {

// dH/d(log l) for the Matern-3/2 kernel: 3 s^2 rho^2 exp(-sqrt(3) rho),
// rho = r / l. Diagonal is zero.
Matrix dh_dlog_lengthscale(const Matrix& dist, const KernelHyperparams& hyp) {
  const double s2 = hyp.signal_scale * hyp.signal_scale;
  const Eigen::ArrayXXd rho = dist.array() / hyp.lengthscale;
  return (3.0 * s2 * rho.square() * (-kSqrt3 * rho).exp()).matrix();
}

MllResult mll_with_dist(const Matrix& dist, const Vector& y, const KernelHyperparams& hyp) {
  const Index n = y.size();
  const double s2 = hyp.signal_scale * hyp.signal_scale;

  const Eigen::ArrayXXd z = dist.array() * (kSqrt3 / hyp.lengthscale);
  const Matrix K = (s2 * (1.0 + z) * (-z).exp()).matrix();
  Matrix H = K;
  H.diagonal().array() += hyp.noise_scale * hyp.noise_scale;

  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) {
    throw NotSpdError("mll: covariance not SPD at these hyperparameters");
  }
  const Vector alpha = llt.solve(y);
  double logdet = 0.0;
  for (Index i = 0; i < n; ++i) logdet += std::log(llt.matrixLLT()(i, i));
  logdet *= 2.0;

  MllResult out;
  out.value = -0.5 * y.dot(alpha) - 0.5 * logdet - 0.5 * static_cast<double>(n) * kLog2Pi;

  // grad_j = 0.5 tr((alpha alpha^T - H^{-1}) dH_j)
  const Matrix Hinv = llt.solve(Matrix::Identity(n, n));
  const Matrix A = alpha * alpha.transpose() - Hinv;

  const Matrix dK_dl = dh_dlog_lengthscale(dist, hyp);
  out.grad(0) = 0.5 * A.cwiseProduct(dK_dl).sum();
  out.grad(1) = 0.5 * A.cwiseProduct(2.0 * K).sum();
  out.grad(2) = 0.5 * A.diagonal().sum() * 2.0 * hyp.noise_scale * hyp.noise_scale;
  return out;
}

}  // namespace

MllResult mll(const Matrix& X, const Vector& y, const KernelHyperparams& hyp) {
  hyp.validate();
  if (X.rows() != y.size()) throw std::invalid_argument("mll: X rows != y length");
  return mll_with_dist(pairwise_distances(X, X), y, hyp);
}

KernelHyperparams optimize_mll(const Matrix& X, const Vector& y, const KernelHyperparams& init_hyp,
                               int steps, double step_size) {
  init_hyp.validate();
  const Matrix dist = pairwise_distances(X, X);

  Eigen::Vector3d theta(std::log(init_hyp.lengthscale), std::log(init_hyp.signal_scale),
                        std::log(init_hyp.noise_scale));
  // Soft box keeping the covariance factorizable in double precision.
  const Eigen::Vector3d lo(std::log(1e-3), std::log(1e-3), std::log(1e-4));
  const Eigen::Vector3d hi(std::log(1e3), std::log(1e3), std::log(1e2));

  auto to_hyp = [](const Eigen::Vector3d& t) {
    return KernelHyperparams{std::exp(t(0)), std::exp(t(1)), std::exp(t(2))};
  };

  MllResult cur = mll_with_dist(dist, y, to_hyp(theta));
  if (!std::isfinite(cur.value)) {
    throw std::runtime_error("optimize_mll: non-finite MLL at the initial hyperparameters");
  }
  Eigen::Vector3d best_theta = theta;
  double best_value = cur.value;

  Eigen::Vector3d m = Eigen::Vector3d::Zero(), v = Eigen::Vector3d::Zero();
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  for (int t = 1; t <= steps; ++t) {
    m = beta1 * m + (1.0 - beta1) * cur.grad;
    v = beta2 * v + (1.0 - beta2) * cur.grad.cwiseProduct(cur.grad).eval();
    const double bc1 = 1.0 - std::pow(beta1, t);
    const double bc2 = 1.0 - std::pow(beta2, t);
    const Eigen::Vector3d step =
        (m / bc1).cwiseQuotient(((v / bc2).cwiseSqrt().array() + eps).matrix());
    theta = (theta + step_size * step).cwiseMax(lo).cwiseMin(hi);

    cur = mll_with_dist(dist, y, to_hyp(theta));
    if (!std::isfinite(cur.value)) {
      throw std::runtime_error("optimize_mll: non-finite MLL at step " + std::to_string(t) +
                               " (lengthscale " + std::to_string(std::exp(theta(0))) + ")");
    }
    if (cur.value > best_value) {
      best_value = cur.value;
      best_theta = theta;
    }
  }
  return to_hyp(best_theta);
}

double median_heuristic_lengthscale(const Matrix& X, std::uint64_t seed) {
  const Index cap = std::min<Index>(X.rows(), 256);
  Matrix sub(cap, X.cols());
  Rng rng(derive_seed(seed, 0x6d656469));
  for (Index i = 0; i < cap; ++i) {
    sub.row(i) = X.row(static_cast<Index>(rng.uniform_index(static_cast<std::size_t>(X.rows()))));
  }
  const Matrix d = pairwise_distances(sub, sub);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(cap * (cap - 1) / 2));
  for (Index j = 0; j < cap; ++j) {
    for (Index i = j + 1; i < cap; ++i) vals.push_back(d(i, j));
  }
  if (vals.empty()) return 1.0;
  std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
  const double med = vals[vals.size() / 2];
  return med > 0.0 ? med : 1.0;
}

}  // namespace warmgp
