#include "warmgp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "warmgp/rng.hpp"

namespace warmgp {

const char* method_name(Method m) {
  switch (m) {
    case Method::CG: return "cg";
    case Method::SGD: return "sgd";
    case Method::AP: return "ap";
  }
  return "?";
}

Method method_from_name(std::string_view name) {
  if (name == "cg") return Method::CG;
  if (name == "sgd") return Method::SGD;
  if (name == "ap") return Method::AP;
  throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

Vector init_weights(const Initialization& init, Index n1, Index n2) {
  if (n1 < 0 || n2 < 0) throw std::invalid_argument("init_weights: negative block size");
  Vector v = Vector::Zero(n1 + n2);
  if (init.warm_start) {
    if (init.u1.size() != n1) {
      throw std::invalid_argument("init_weights: warm-start vector length does not match n1");
    }
    v.head(n1) = init.u1;
  }
  return v;
}

namespace {

// Expands the initialization against a system of size n. For a warm start
// the previous solution occupies the leading coordinates.
Vector expand_init(const Initialization& init, Index n) {
  if (!init.warm_start) return Vector::Zero(n);
  const Index n1 = init.u1.size();
  if (n1 > n) throw std::invalid_argument("initialization longer than the system");
  return init_weights(init, n1, n - n1);
}

// Zero right-hand side: the solution is zero, declared converged up front.
SolveResult zero_rhs_result(Index n) {
  SolveResult res;
  res.v = Vector::Zero(n);
  res.iterations = 0;
  res.residual_history = {0.0};
  res.converged = true;
  return res;
}

}  // namespace

double relative_residual(const Matrix& H, const Vector& v, const Vector& b) {
  const double bnorm = b.norm();
  if (bnorm == 0.0) throw std::invalid_argument("relative_residual: zero right-hand side");
  return (H * v - b).norm() / bnorm;
}

double quadratic_objective(const Matrix& H, const Vector& v, const Vector& b) {
  return 0.5 * v.dot(H * v) - v.dot(b);
}

Matrix pivoted_cholesky(const Matrix& H, Index rank) {
  const Index n = H.rows();
  if (rank < 0 || rank > n) throw std::invalid_argument("pivoted_cholesky: rank out of range");

  Vector d = H.diagonal();
  const double floor = 1e-12 * std::max(d.maxCoeff(), 0.0);
  Matrix L = Matrix::Zero(n, rank);
  std::vector<bool> used(static_cast<std::size_t>(n), false);

  Index achieved = 0;
  for (Index k = 0; k < rank; ++k) {
    Index piv = -1;
    double best = floor;
    for (Index i = 0; i < n; ++i) {
      if (!used[static_cast<std::size_t>(i)] && d(i) > best) {
        best = d(i);
        piv = i;
      }
    }
    if (piv < 0) break;  // no positive pivot beyond the numerical floor

    const double root = std::sqrt(d(piv));
    Vector col = H.col(piv);
    if (k > 0) col.noalias() -= L.leftCols(k) * L.row(piv).head(k).transpose();
    L.col(k) = col / root;
    L(piv, k) = root;

    used[static_cast<std::size_t>(piv)] = true;
    for (Index i = 0; i < n; ++i) {
      if (!used[static_cast<std::size_t>(i)]) d(i) -= L(i, k) * L(i, k);
    }
    d(piv) = 0.0;
    achieved = k + 1;
  }
  return L.leftCols(achieved);
}

CgPreconditioner::CgPreconditioner(Matrix low_rank_factor, double shift)
    : L_(std::move(low_rank_factor)), shift_(shift) {
  if (L_.cols() == 0) return;
  if (!(shift > 0.0)) {
    throw std::invalid_argument("CgPreconditioner: shift must be positive for rank > 0");
  }
  Matrix cap = L_.transpose() * L_;
  cap.diagonal().array() += shift;
  capacitance_.compute(cap);
  if (capacitance_.info() != Eigen::Success) {
    throw NotSpdError("CgPreconditioner: capacitance factorization failed");
  }
}

CgPreconditioner CgPreconditioner::from_matrix(const Matrix& H, Index rank, double shift,
                                               SolverConfig::PrecondShiftMode mode) {
  rank = std::min(rank, H.rows());
  if (rank <= 0) return CgPreconditioner();
  Matrix L = pivoted_cholesky(H, rank);
  if (mode == SolverConfig::PrecondShiftMode::Calibrated) {
    const double leftover = (H.trace() - L.squaredNorm()) / static_cast<double>(H.rows());
    shift += std::max(leftover, 0.0);
  }
  return CgPreconditioner(std::move(L), shift);
}

Vector CgPreconditioner::apply(const Vector& r) const {
  if (is_identity()) return r;
  // (L L^T + s I)^{-1} r = (r - L (s I + L^T L)^{-1} L^T r) / s
  const Vector t = capacitance_.solve(L_.transpose() * r);
  return (r - L_ * t) / shift_;
}

SolveResult cg_solve_with(const Matrix& H, const Vector& b, const Initialization& init,
                          const SolverConfig& cfg, const CgPreconditioner& precond) {
  const Index n = H.rows();
  if (b.norm() == 0.0) return zero_rhs_result(n);
  const double bnorm = b.norm();

  SolveResult res;
  res.v = expand_init(init, n);
  Vector r = b - H * res.v;
  res.residual_history.push_back(r.norm() / bnorm);
  if (res.residual_history.back() <= cfg.tolerance) {
    res.converged = true;
    return res;
  }

  Vector z = precond.apply(r);
  Vector p = z;
  double rz = r.dot(z);

  for (int k = 1; k <= cfg.max_iters; ++k) {
    const Vector Hp = H * p;
    const double pHp = p.dot(Hp);
    if (pHp <= 0.0) {
      throw NotSpdError("cg_solve: non-positive curvature encountered");
    }
    const double alpha = rz / pHp;
    res.v += alpha * p;

    // True residual, not the recurrence, both for the history and stopping.
    r = b - H * res.v;
    const double rel = r.norm() / bnorm;
    res.residual_history.push_back(rel);
    res.iterations = k;
    if (rel <= cfg.tolerance) {
      res.converged = true;
      break;
    }
    z = precond.apply(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }
  return res;
}

SolveResult cg_solve(const Matrix& H, const Vector& b, const Initialization& init,
                     const SolverConfig& cfg) {
  const auto precond = CgPreconditioner::from_matrix(H, cfg.precond_rank, cfg.precond_shift, cfg.precond_shift_mode);
  return cg_solve_with(H, b, init, cfg, precond);
}

SolveResult sgd_solve(const Matrix& H, const Vector& b, const Initialization& init,
                      const SolverConfig& cfg) {
  const Index n = H.rows();
  if (b.norm() == 0.0) return zero_rhs_result(n);
  const double bnorm = b.norm();
  const Index batch = std::min(cfg.batch_size, n);
  if (batch <= 0) throw std::invalid_argument("sgd_solve: batch size must be positive");

  SolveResult res;
  res.v = expand_init(init, n);
  res.residual_history.push_back((b - H * res.v).norm() / bnorm);
  if (res.residual_history.back() <= cfg.tolerance) {
    res.converged = true;
    return res;
  }

  const double scale =
      cfg.sgd_scaling == SgdScaling::Unbiased ? static_cast<double>(n) / static_cast<double>(batch)
                                              : 1.0;
  Rng rng(cfg.seed);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  Vector velocity = Vector::Zero(n);

  for (int k = 1; k <= cfg.max_iters; ++k) {
    // Uniform batch without replacement via a partial shuffle.
    for (Index i = 0; i < batch; ++i) {
      const std::size_t j =
          static_cast<std::size_t>(i) + rng.uniform_index(static_cast<std::size_t>(n - i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    velocity *= cfg.momentum;
    for (Index i = 0; i < batch; ++i) {
      const Index row = idx[static_cast<std::size_t>(i)];
      velocity(row) += scale * (H.row(row).dot(res.v) - b(row));
    }
    res.v -= cfg.learning_rate * velocity;

    const double rel = (b - H * res.v).norm() / bnorm;
    res.residual_history.push_back(rel);
    res.iterations = k;
    if (rel > 1e3 || !std::isfinite(rel)) {
      throw DivergenceError("sgd_solve: diverged (relative residual above 1e3)", k);
    }
    if (rel <= cfg.tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

SolveResult ap_solve(const Matrix& H, const Vector& b, const Initialization& init,
                     const SolverConfig& cfg) {
  const Index n = H.rows();
  if (b.norm() == 0.0) return zero_rhs_result(n);
  const double bnorm = b.norm();
  const Index bs = std::min(cfg.block_size, n);
  if (bs <= 0) throw std::invalid_argument("ap_solve: block size must be positive");

  // Contiguous index blocks; the last one may be smaller.
  const Index n_blocks = (n + bs - 1) / bs;
  std::vector<Eigen::LLT<Matrix>> factors;
  factors.reserve(static_cast<std::size_t>(n_blocks));
  for (Index blk = 0; blk < n_blocks; ++blk) {
    const Index start = blk * bs;
    const Index len = std::min(bs, n - start);
    factors.emplace_back(Matrix(H.block(start, start, len, len)));
    if (factors.back().info() != Eigen::Success) {
      throw NotSpdError("ap_solve: diagonal block factorization failed");
    }
  }

  SolveResult res;
  res.v = expand_init(init, n);
  Vector r = b - H * res.v;
  res.residual_history.push_back(r.norm() / bnorm);
  if (res.residual_history.back() <= cfg.tolerance) {
    res.converged = true;
    return res;
  }

  for (int k = 1; k <= cfg.max_iters; ++k) {
    Index blk = static_cast<Index>((k - 1) % n_blocks);
    if (cfg.ap_ordering == ApOrdering::Greedy) {
      double best = -1.0;
      for (Index c = 0; c < n_blocks; ++c) {
        const double norm = r.segment(c * bs, std::min(bs, n - c * bs)).norm();
        if (norm > best) {
          best = norm;
          blk = c;
        }
      }
    }
    const Index start = blk * bs;
    const Index len = std::min(bs, n - start);

    const Vector delta = factors[static_cast<std::size_t>(blk)].solve(r.segment(start, len));
    res.v.segment(start, len) += delta;
    r.noalias() -= H.middleCols(start, len) * delta;
    if (k % static_cast<int>(n_blocks) == 0) r = b - H * res.v;  // refresh against drift

    double rel = r.norm() / bnorm;
    if (rel <= cfg.tolerance) {
      // Confirm with the true residual before declaring convergence.
      r = b - H * res.v;
      rel = r.norm() / bnorm;
    }
    res.residual_history.push_back(rel);
    res.iterations = k;
    if (rel <= cfg.tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

SolveResult solve(const Matrix& H, const Vector& b, const Initialization& init,
                  const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::CG: return cg_solve(H, b, init, cfg);
    case Method::SGD: return sgd_solve(H, b, init, cfg);
    case Method::AP: return ap_solve(H, b, init, cfg);
  }
  throw std::invalid_argument("solve: unknown method");
}

std::vector<SolveResult> solve_many(const Matrix& H, const Matrix& rhs_columns,
                                    const std::vector<Initialization>& inits,
                                    const SolverConfig& cfg) {
  const Index k = rhs_columns.cols();
  if (static_cast<Index>(inits.size()) != k) {
    throw std::invalid_argument("solve_many: one initialization per right-hand side required");
  }
  CgPreconditioner precond;
  if (cfg.method == Method::CG) {
    precond = CgPreconditioner::from_matrix(H, cfg.precond_rank, cfg.precond_shift, cfg.precond_shift_mode);
  }

  std::vector<SolveResult> results;
  results.reserve(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) {
    const Vector b = rhs_columns.col(i);
    const auto& init = inits[static_cast<std::size_t>(i)];
    switch (cfg.method) {
      case Method::CG:
        results.push_back(cg_solve_with(H, b, init, cfg, precond));
        break;
      case Method::SGD: {
        SolverConfig per_rhs = cfg;
        per_rhs.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
        results.push_back(sgd_solve(H, b, init, per_rhs));
        break;
      }
      case Method::AP:
        results.push_back(ap_solve(H, b, init, cfg));
        break;
    }
  }
  return results;
}

}  // namespace warmgp
