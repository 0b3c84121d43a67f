// Timing comparison between the serial reference kernels and the OpenMP
// variants used by the solvers. Also reports the max absolute deviation,
// which stays at exactly zero because both variants keep the same per-slot
// summation order.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "wotkit/kernels.hpp"

namespace {

using Clock = std::chrono::steady_clock;
namespace wk = wotkit::kernels;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

void bench_size(int n, int m, int reps) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Eigen::MatrixXd P(n, m), G(n, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      P(i, j) = unif(rng);
      G(i, j) = unif(rng) - 0.5;
    }
  }
  Eigen::VectorXd v = Eigen::VectorXd::Constant(m, 1.0 / m);
  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
  const Eigen::MatrixXd L = P.array().log();

  Eigen::MatrixXd out_s, out_p;
  Eigen::VectorXd y_s, y_p;

  struct Row {
    const char* name;
    double serial_ms;
    double omp_ms;
    double max_diff;
  };
  std::vector<Row> rows;

  {
    const double ts = time_best_of(reps, [&] { wk::reference::scaled_exp(P, G, 0.1, out_s); });
    const double tp = time_best_of(reps, [&] { wk::scaled_exp(P, G, 0.1, out_p); });
    rows.push_back({"scaled_exp", ts, tp, (out_s - out_p).cwiseAbs().maxCoeff()});
  }
  {
    const double ts = time_best_of(reps, [&] { wk::reference::matvec(P, v, y_s); });
    const double tp = time_best_of(reps, [&] { wk::matvec(P, v, y_p); });
    rows.push_back({"matvec", ts, tp, (y_s - y_p).cwiseAbs().maxCoeff()});
  }
  {
    const double ts = time_best_of(reps, [&] { wk::reference::matvec_transpose(P, u, y_s); });
    const double tp = time_best_of(reps, [&] { wk::matvec_transpose(P, u, y_p); });
    rows.push_back({"matvec_transpose", ts, tp, (y_s - y_p).cwiseAbs().maxCoeff()});
  }
  {
    const double ts = time_best_of(reps, [&] { wk::reference::row_logsumexp(L, v, y_s); });
    const double tp = time_best_of(reps, [&] { wk::row_logsumexp(L, v, y_p); });
    rows.push_back({"row_logsumexp", ts, tp, (y_s - y_p).cwiseAbs().maxCoeff()});
  }
  {
    const double ts = time_best_of(reps, [&] { wk::reference::col_logsumexp(L, u, y_s); });
    const double tp = time_best_of(reps, [&] { wk::col_logsumexp(L, u, y_p); });
    rows.push_back({"col_logsumexp", ts, tp, (y_s - y_p).cwiseAbs().maxCoeff()});
  }

  for (const Row& r : rows) {
    std::printf("%-18s %6dx%-6d %10.3f %10.3f %8.2fx %10.3g\n", r.name, n, m,
                r.serial_ms, r.omp_ms, r.serial_ms / std::max(r.omp_ms, 1e-9),
                r.max_diff);
  }
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 5;
  if (argc > 1) reps = std::atoi(argv[1]);
  std::printf("threads: %d\n", wk::max_threads());
  std::printf("%-18s %-13s %10s %10s %9s %10s\n", "kernel", "size", "serial_ms",
              "omp_ms", "speedup", "max_diff");
  bench_size(200, 200, reps);
  bench_size(800, 800, reps);
  bench_size(2000, 2000, reps);
  return 0;
}
