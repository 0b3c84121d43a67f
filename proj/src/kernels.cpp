#include "wotkit/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wotkit::kernels {

namespace {

// Row/column entry update shared by both variants.
inline double exp_update(double p, double g, double gamma, bool& clamped) {
  const double v = p * std::exp(gamma * g);
  if (v > 0.0 && std::isfinite(v)) return v;
  clamped = true;
  double t = std::log(p) + gamma * g;
  t = std::min(std::max(t, -kExpClamp), kExpClamp);
  return std::exp(t);
}

inline double logsumexp_span(const double* vals, Eigen::Index k) {
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < k; ++i) hi = std::max(hi, vals[i]);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) s += std::exp(vals[i] - hi);
  return hi + std::log(s);
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* env = std::getenv("WOTKIT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

bool scaled_exp(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G, double gamma,
                Eigen::MatrixXd& out) {
  const Eigen::Index n = P.rows(), m = P.cols();
  out.resize(n, m);
  int clamped_any = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads()) \
    reduction(|| : clamped_any) if (n * m > 4096)
#endif
  for (Eigen::Index i = 0; i < n; ++i) {
    bool clamped = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      out(i, j) = exp_update(P(i, j), G(i, j), gamma, clamped);
    }
    clamped_any = clamped_any || clamped;
  }
  return clamped_any != 0;
}

void matvec(const Eigen::MatrixXd& M, const Eigen::VectorXd& v, Eigen::VectorXd& y) {
  const Eigen::Index n = M.rows(), m = M.cols();
  y.resize(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (n * m > 4096)
#endif
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) s += M(i, j) * v[j];
    y[i] = s;
  }
}

void matvec_transpose(const Eigen::MatrixXd& M, const Eigen::VectorXd& v,
                      Eigen::VectorXd& y) {
  const Eigen::Index n = M.rows(), m = M.cols();
  y.resize(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (n * m > 4096)
#endif
  for (Eigen::Index j = 0; j < m; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += M(i, j) * v[i];
    y[j] = s;
  }
}

void row_logsumexp(const Eigen::MatrixXd& L, const Eigen::VectorXd& g,
                   Eigen::VectorXd& out) {
  const Eigen::Index n = L.rows(), m = L.cols();
  out.resize(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (n * m > 4096)
#endif
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd row = L.row(i).transpose() + g;
    out[i] = logsumexp_span(row.data(), m);
  }
}

void col_logsumexp(const Eigen::MatrixXd& L, const Eigen::VectorXd& f,
                   Eigen::VectorXd& out) {
  const Eigen::Index n = L.rows(), m = L.cols();
  out.resize(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (n * m > 4096)
#endif
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::VectorXd col = L.col(j) + f;
    out[j] = logsumexp_span(col.data(), n);
  }
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  std::exception_ptr err = nullptr;
  std::atomic<bool> failed{false};
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (n > 1)
#endif
  for (int i = 0; i < n; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      fn(i);
    } catch (...) {
      bool expected = false;
      if (failed.compare_exchange_strong(expected, true)) {
        err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

namespace reference {

bool scaled_exp(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G, double gamma,
                Eigen::MatrixXd& out) {
  const Eigen::Index n = P.rows(), m = P.cols();
  out.resize(n, m);
  bool clamped = false;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      out(i, j) = exp_update(P(i, j), G(i, j), gamma, clamped);
  return clamped;
}

void matvec(const Eigen::MatrixXd& M, const Eigen::VectorXd& v, Eigen::VectorXd& y) {
  const Eigen::Index n = M.rows(), m = M.cols();
  y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) s += M(i, j) * v[j];
    y[i] = s;
  }
}

void matvec_transpose(const Eigen::MatrixXd& M, const Eigen::VectorXd& v,
                      Eigen::VectorXd& y) {
  const Eigen::Index n = M.rows(), m = M.cols();
  y.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += M(i, j) * v[i];
    y[j] = s;
  }
}

void row_logsumexp(const Eigen::MatrixXd& L, const Eigen::VectorXd& g,
                   Eigen::VectorXd& out) {
  const Eigen::Index n = L.rows(), m = L.cols();
  out.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd row = L.row(i).transpose() + g;
    out[i] = logsumexp_span(row.data(), m);
  }
}

void col_logsumexp(const Eigen::MatrixXd& L, const Eigen::VectorXd& f,
                   Eigen::VectorXd& out) {
  const Eigen::Index n = L.rows(), m = L.cols();
  out.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    Eigen::VectorXd col = L.col(j) + f;
    out[j] = logsumexp_span(col.data(), n);
  }
}

}  // namespace reference

}  // namespace wotkit::kernels
