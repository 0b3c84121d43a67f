#include "wotkit/bregman.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wotkit/kernels.hpp"
#include "wotkit/measures.hpp"

namespace wotkit {

namespace {

constexpr double kLogDomainFloor = 1e-300;

void check_weights(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() < 1 || b.size() < 1 || a.minCoeff() <= 0.0 || b.minCoeff() <= 0.0) {
    throw std::invalid_argument("sinkhorn: marginal weights must be positive");
  }
}

// Alternating scaling on a kernel given in log form. Column sums are exact
// after each g update, so convergence is measured on the rows.
SinkhornResult scale_log_domain(const Eigen::MatrixXd& L, const Eigen::VectorXd& a,
                                const Eigen::VectorXd& b, const SinkhornConfig& config) {
  const Eigen::Index n = L.rows(), m = L.cols();
  SinkhornResult res;
  res.used_log_domain = true;

  const Eigen::VectorXd log_a = a.array().log();
  const Eigen::VectorXd log_b = b.array().log();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd row_lse(n), col_lse(m);

  double err = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < config.max_iters) {
    ++it;
    kernels::row_logsumexp(L, g, row_lse);
    f = log_a - row_lse;
    kernels::col_logsumexp(L, f, col_lse);
    g = log_b - col_lse;

    kernels::row_logsumexp(L, g, row_lse);
    err = ((f + row_lse).array().exp() - a.array()).abs().maxCoeff();
    if (err <= config.marginal_tol) {
      res.converged = true;
      break;
    }
  }

  res.plan.resize(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) res.plan(i, j) = std::exp(L(i, j) + f[i] + g[j]);
  res.potential_f = f;
  res.potential_g = g;
  res.iterations = it;
  res.marginal_error = err;
  return res;
}

SinkhornResult scale_standard(const Eigen::MatrixXd& K, const Eigen::VectorXd& a,
                              const Eigen::VectorXd& b, const SinkhornConfig& config) {
  const Eigen::Index n = K.rows(), m = K.cols();
  SinkhornResult res;

  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
  Eigen::VectorXd Kv(n), Ktu(m);

  double err = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < config.max_iters) {
    ++it;
    kernels::matvec(K, v, Kv);
    u = a.cwiseQuotient(Kv);
    kernels::matvec_transpose(K, u, Ktu);
    v = b.cwiseQuotient(Ktu);

    if (!u.allFinite() || !v.allFinite()) {
      // Scaling blew up; redo the whole solve with logsumexp updates.
      return scale_log_domain(K.array().log().matrix(), a, b, config);
    }

    kernels::matvec(K, v, Kv);
    err = (u.cwiseProduct(Kv) - a).lpNorm<Eigen::Infinity>();
    if (err <= config.marginal_tol) {
      res.converged = true;
      break;
    }
  }

  res.plan = u.asDiagonal() * K * v.asDiagonal();
  res.potential_f = u.array().log();
  res.potential_g = v.array().log();
  res.iterations = it;
  res.marginal_error = err;
  return res;
}

// Dispatch on kernel conditioning: entries below the subnormal cliff (or
// non-representable after exp) force the log-domain path.
SinkhornResult scale_kernel_log(const Eigen::MatrixXd& L, const Eigen::VectorXd& a,
                                const Eigen::VectorXd& b, const SinkhornConfig& config) {
  check_weights(a, b);
  if (L.rows() != a.size() || L.cols() != b.size()) {
    throw std::invalid_argument("sinkhorn: kernel/marginal shape mismatch");
  }
  if (config.max_iters < 1) {
    throw std::invalid_argument("sinkhorn: max_iters must be at least 1");
  }
  const double lo = L.minCoeff(), hi = L.maxCoeff();
  const bool need_log =
      config.log_domain || lo < std::log(kLogDomainFloor) || hi > 690.0;
  if (need_log) return scale_log_domain(L, a, b, config);
  return scale_standard(L.array().exp().matrix(), a, b, config);
}

}  // namespace

SinkhornResult sinkhorn_eot(const Eigen::MatrixXd& C, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b, const SinkhornConfig& config) {
  if (!(config.epsilon > 0.0)) {
    throw std::invalid_argument("sinkhorn_eot: epsilon must be positive");
  }
  if (!C.allFinite()) {
    throw std::invalid_argument("sinkhorn_eot: cost matrix must be finite");
  }
  check_weights(a, b);
  // Gibbs kernel of the maximization problem: K = (a b^T) . exp(C / eps).
  Eigen::MatrixXd L(C.rows(), C.cols());
  for (Eigen::Index i = 0; i < C.rows(); ++i)
    for (Eigen::Index j = 0; j < C.cols(); ++j)
      L(i, j) = std::log(a[i]) + std::log(b[j]) + C(i, j) / config.epsilon;
  SinkhornResult res = scale_kernel_log(L, a, b, config);
  res.potential_f *= config.epsilon;
  res.potential_g *= config.epsilon;
  return res;
}

SinkhornResult kl_project_couplings(const Eigen::MatrixXd& P, const Eigen::VectorXd& a,
                                    const Eigen::VectorXd& b,
                                    const SinkhornConfig& config) {
  if (!P.allFinite() || P.minCoeff() <= 0.0) {
    throw std::invalid_argument(
        "kl_project_couplings: kernel must be strictly positive and finite");
  }
  return scale_kernel_log(P.array().log().matrix(), a, b, config);
}

Eigen::MatrixXd kl_project_second_marginal(const Eigen::MatrixXd& P,
                                           const Eigen::VectorXd& b) {
  if (P.cols() != b.size()) {
    throw std::invalid_argument("kl_project_second_marginal: shape mismatch");
  }
  if (!P.allFinite() || P.minCoeff() < 0.0) {
    throw std::invalid_argument("kl_project_second_marginal: P must be >= 0 and finite");
  }
  const Eigen::VectorXd s = col_sums(P);
  Eigen::MatrixXd Q(P.rows(), P.cols());
  for (Eigen::Index j = 0; j < P.cols(); ++j) {
    if (s[j] <= 0.0) {
      throw std::invalid_argument("kl_project_second_marginal: zero column");
    }
    Q.col(j) = P.col(j) * (b[j] / s[j]);
  }
  return Q;
}

Eigen::MatrixXd kl_project_first_marginal(const Eigen::MatrixXd& P,
                                          const Eigen::VectorXd& a) {
  if (P.rows() != a.size()) {
    throw std::invalid_argument("kl_project_first_marginal: shape mismatch");
  }
  if (!P.allFinite() || P.minCoeff() < 0.0) {
    throw std::invalid_argument("kl_project_first_marginal: P must be >= 0 and finite");
  }
  Eigen::MatrixXd Q(P.rows(), P.cols());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    const double s = P.row(i).sum();
    if (s <= 0.0) {
      throw std::invalid_argument("kl_project_first_marginal: zero row");
    }
    Q.row(i) = P.row(i) * (a[i] / s);
  }
  return Q;
}

double kl_divergence(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  if (Q.rows() != R.rows() || Q.cols() != R.cols()) {
    throw std::invalid_argument("kl_divergence: shape mismatch");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < Q.rows(); ++i) {
    for (Eigen::Index j = 0; j < Q.cols(); ++j) {
      const double q = Q(i, j), r = R(i, j);
      if (q > 0.0) total += q * (std::log(q / r) - 1.0);
      total += r;
    }
  }
  return total;
}

}  // namespace wotkit
