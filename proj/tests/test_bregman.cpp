#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "wotkit/bregman.hpp"
#include "wotkit/measures.hpp"

using namespace wotkit;

namespace {

Eigen::MatrixXd random_positive(int n, int m, std::mt19937_64& rng, double lo = 0.1,
                                double hi = 2.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Eigen::MatrixXd M(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) M(i, j) = unif(rng);
  return M;
}

}  // namespace

TEST_CASE("closed-form second-marginal projection") {
  Eigen::MatrixXd P(2, 2);
  P << 1, 2, 3, 4;
  Eigen::Vector2d b(0.5, 0.5);
  const Eigen::MatrixXd Q = kl_project_second_marginal(P, b);

  SUBCASE("hand-computed values") {
    CHECK(Q(0, 0) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(Q(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(Q(1, 0) == doctest::Approx(0.375).epsilon(1e-15));
    CHECK(Q(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }

  SUBCASE("column sums equal b") {
    CHECK((col_sums(Q) - b).lpNorm<Eigen::Infinity>() <= 1e-15);
  }

  SUBCASE("KKT: log(Q/P) is constant per column") {
    for (int j = 0; j < 2; ++j) {
      const double l0 = std::log(Q(0, j) / P(0, j));
      const double l1 = std::log(Q(1, j) / P(1, j));
      CHECK(l0 == doctest::Approx(l1).epsilon(1e-12));
    }
  }

  SUBCASE("already-feasible input is unchanged") {
    const Eigen::MatrixXd R = kl_project_second_marginal(Q, b);
    CHECK((R - Q).cwiseAbs().maxCoeff() <= 1e-15);
  }

  SUBCASE("zero column throws") {
    Eigen::MatrixXd Z(2, 2);
    Z << 0, 1, 0, 1;
    CHECK_THROWS_AS(kl_project_second_marginal(Z, b), std::invalid_argument);
  }
}

TEST_CASE("second-marginal projection matches the iterative KL oracle") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::MatrixXd P = random_positive(5, 5, rng);
    const Eigen::VectorXd b = oracles::random_weights(5, rng);
    const Eigen::MatrixXd Q = kl_project_second_marginal(P, b);
    const Eigen::MatrixXd Qo = oracles::kl_project_columns_oracle(P, b);
    CHECK(std::abs(kl_divergence(Q, P) - kl_divergence(Qo, P)) <= 1e-8);
    CHECK((Q - Qo).cwiseAbs().maxCoeff() <= 1e-7);
  }
}

TEST_CASE("closed-form first-marginal projection") {
  Eigen::MatrixXd P(2, 2);
  P << 1, 1, 1, 3;
  Eigen::Vector2d a(0.5, 0.5);
  const Eigen::MatrixXd Q = kl_project_first_marginal(P, a);
  CHECK(Q(0, 0) == doctest::Approx(0.25));
  CHECK(Q(0, 1) == doctest::Approx(0.25));
  CHECK(Q(1, 0) == doctest::Approx(0.125));
  CHECK(Q(1, 1) == doctest::Approx(0.375));
  CHECK((row_sums(Q) - a).lpNorm<Eigen::Infinity>() <= 1e-15);

  SUBCASE("row sums already a leaves P unchanged") {
    const Eigen::MatrixXd R = kl_project_first_marginal(Q, a);
    CHECK((R - Q).cwiseAbs().maxCoeff() <= 1e-15);
  }

  SUBCASE("zero row throws") {
    Eigen::MatrixXd Z(2, 2);
    Z << 0, 0, 1, 1;
    CHECK_THROWS_AS(kl_project_first_marginal(Z, a), std::invalid_argument);
  }
}

TEST_CASE("transpose symmetry of the two closed forms") {
  std::mt19937_64 rng(43);
  const Eigen::MatrixXd P = random_positive(3, 4, rng);
  const Eigen::VectorXd b = oracles::random_weights(4, rng);
  const Eigen::MatrixXd lhs =
      kl_project_first_marginal(P.transpose(), b).transpose();
  const Eigen::MatrixXd rhs = kl_project_second_marginal(P, b);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("sinkhorn projection onto the transport polytope") {
  std::mt19937_64 rng(47);
  SinkhornConfig cfg;

  SUBCASE("product coupling is a fixed point") {
    Eigen::Vector2d a(0.3, 0.7), b(0.6, 0.4);
    const Eigen::MatrixXd P = a * b.transpose();
    const SinkhornResult res = kl_project_couplings(P, a, b, cfg);
    CHECK(res.converged);
    CHECK((res.plan - P).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("uniform matrix projects to the uniform coupling") {
    Eigen::MatrixXd P = Eigen::MatrixXd::Ones(2, 2);
    Eigen::Vector2d half(0.5, 0.5);
    const SinkhornResult res = kl_project_couplings(P, half, half, cfg);
    CHECK((res.plan - Eigen::MatrixXd::Constant(2, 2, 0.25)).cwiseAbs().maxCoeff() <=
          1e-12);
  }

  SUBCASE("marginals land within tolerance and beat random feasible points") {
    const Eigen::MatrixXd P = random_positive(3, 4, rng);
    const Eigen::VectorXd a = oracles::random_weights(3, rng);
    const Eigen::VectorXd b = oracles::random_weights(4, rng);
    const SinkhornResult res = kl_project_couplings(P, a, b, cfg);
    CHECK(res.converged);
    const auto r = feasibility_residuals(res.plan, a, b, ProblemKind::Wot);
    CHECK(r.row_inf <= 1e-9);
    CHECK(r.col_inf <= 1e-9);
    CHECK(res.plan.minCoeff() > 0.0);

    const double kl_star = kl_divergence(res.plan, P);
    for (int t = 0; t < 1000; ++t) {
      const Eigen::MatrixXd Q = oracles::random_coupling(a, b, rng);
      CHECK(kl_divergence(Q, P) >= kl_star - 1e-9);
    }
  }

  SUBCASE("scaling structure diag(u) P diag(v)") {
    const Eigen::MatrixXd P = random_positive(3, 3, rng);
    const Eigen::VectorXd a = oracles::random_weights(3, rng);
    const Eigen::VectorXd b = oracles::random_weights(3, rng);
    const SinkhornResult res = kl_project_couplings(P, a, b, cfg);
    // ratio plan/P must factor as exp(f_i + g_j)
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double expected = std::exp(res.potential_f[i] + res.potential_g[j]);
        CHECK(res.plan(i, j) / P(i, j) == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }

  SUBCASE("zeros and non-finite kernels are rejected") {
    Eigen::MatrixXd Z(2, 2);
    Z << 0.5, 0.0, 0.5, 1.0;
    Eigen::Vector2d half(0.5, 0.5);
    CHECK_THROWS_AS(kl_project_couplings(Z, half, half, cfg), std::invalid_argument);
    Z(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(kl_project_couplings(Z, half, half, cfg), std::invalid_argument);
  }
}

TEST_CASE("coupling projection matches a generic convex-solver oracle") {
  std::mt19937_64 rng(61);
  SinkhornConfig cfg;
  cfg.marginal_tol = 1e-12;
  for (int rep = 0; rep < 3; ++rep) {
    const Eigen::MatrixXd P = random_positive(4, 5, rng);
    const Eigen::VectorXd a = oracles::random_weights(4, rng);
    const Eigen::VectorXd b = oracles::random_weights(5, rng);
    const Eigen::MatrixXd Q = kl_project_couplings(P, a, b, cfg).plan;
    const Eigen::MatrixXd Qo = oracles::kl_project_couplings_oracle(P, a, b);
    CHECK(std::abs(kl_divergence(Q, P) - kl_divergence(Qo, P)) <= 1e-8);
  }
}

TEST_CASE("projection idempotence") {
  std::mt19937_64 rng(53);
  const Eigen::MatrixXd P = random_positive(4, 3, rng);
  const Eigen::VectorXd a = oracles::random_weights(4, rng);
  const Eigen::VectorXd b = oracles::random_weights(3, rng);

  // The Sinkhorn projection is idempotent to the tolerance it is run at, so
  // the 1e-12 idempotence check needs a tight stopping tolerance.
  SinkhornConfig cfg;
  cfg.marginal_tol = 1e-14;
  const Eigen::MatrixXd once = kl_project_couplings(P, a, b, cfg).plan;
  const Eigen::MatrixXd twice = kl_project_couplings(once, a, b, cfg).plan;
  CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-12);

  const Eigen::MatrixXd c1 = kl_project_second_marginal(P, b);
  const Eigen::MatrixXd c2 = kl_project_second_marginal(c1, b);
  CHECK((c1 - c2).cwiseAbs().maxCoeff() <= 1e-12);

  const Eigen::MatrixXd r1 = kl_project_first_marginal(P, a);
  const Eigen::MatrixXd r2 = kl_project_first_marginal(r1, a);
  CHECK((r1 - r2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("entropic OT") {
  SUBCASE("huge epsilon returns the product coupling") {
    Eigen::Vector2d a(0.4, 0.6), b(0.7, 0.3);
    Eigen::MatrixXd C(2, 2);
    C << 1, 0, 0, 1;
    SinkhornConfig cfg;
    cfg.epsilon = 1e3;
    cfg.marginal_tol = 1e-10;
    const SinkhornResult res = sinkhorn_eot(C, a, b, cfg);
    CHECK(res.converged);
    CHECK((res.plan - a * b.transpose()).cwiseAbs().maxCoeff() <= 1e-3);
  }

  SUBCASE("1x1 problem is forced") {
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd C(1, 1);
    C << 3.0;
    SinkhornConfig cfg;
    const SinkhornResult res = sinkhorn_eot(C, one, one, cfg);
    CHECK(res.plan(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("identity-cost plan matches the fixed-point oracle") {
    Eigen::Vector2d a(0.5, 0.5), b(0.5, 0.5);
    Eigen::MatrixXd C(2, 2);
    C << 1, 0, 0, 1;
    SinkhornConfig cfg;
    cfg.epsilon = 0.1;
    cfg.marginal_tol = 1e-12;
    const SinkhornResult res = sinkhorn_eot(C, a, b, cfg);

    Eigen::MatrixXd K(2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) K(i, j) = a[i] * b[j] * std::exp(C(i, j) / 0.1);
    const Eigen::MatrixXd oracle = oracles::sinkhorn_fixed_point(K, a, b);
    CHECK((res.plan - oracle).cwiseAbs().maxCoeff() <= 1e-10);

    // closed form by symmetry: diagonal 0.5 e^10 / (e^10 + 1)
    const double diag = 0.5 * std::exp(10.0) / (std::exp(10.0) + 1.0);
    CHECK(res.plan(0, 0) == doctest::Approx(diag).epsilon(1e-10));
    CHECK(res.plan(0, 1) == doctest::Approx(0.5 - diag).epsilon(1e-8));
    CHECK(res.plan(0, 0) > res.plan(0, 1));
  }

  SUBCASE("non-convergence is flagged, best iterate returned") {
    Eigen::Vector2d a(0.5, 0.5), b(0.5, 0.5);
    Eigen::MatrixXd C(2, 2);
    C << 5, 0, 0, 5;
    SinkhornConfig cfg;
    cfg.epsilon = 1e-3;
    cfg.max_iters = 2;
    cfg.marginal_tol = 1e-14;
    const SinkhornResult res = sinkhorn_eot(C, a, b, cfg);
    CHECK_FALSE(res.converged);
    CHECK(res.plan.allFinite());
  }
}

TEST_CASE("log-domain and standard-domain sinkhorn agree") {
  std::mt19937_64 rng(59);
  const Eigen::MatrixXd P = random_positive(4, 5, rng);
  const Eigen::VectorXd a = oracles::random_weights(4, rng);
  const Eigen::VectorXd b = oracles::random_weights(5, rng);

  SinkhornConfig std_cfg;
  std_cfg.marginal_tol = 1e-12;
  SinkhornConfig log_cfg = std_cfg;
  log_cfg.log_domain = true;

  const SinkhornResult rs = kl_project_couplings(P, a, b, std_cfg);
  const SinkhornResult rl = kl_project_couplings(P, a, b, log_cfg);
  CHECK_FALSE(rs.used_log_domain);
  CHECK(rl.used_log_domain);
  CHECK((rs.plan - rl.plan).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("log domain auto-enables on extreme kernels") {
  Eigen::MatrixXd P(2, 2);
  P << 1e-310, 1.0, 1.0, 1e-310;  // subnormal corner entries
  Eigen::Vector2d half(0.5, 0.5);
  SinkhornConfig cfg;
  const SinkhornResult res = kl_project_couplings(P, half, half, cfg);
  CHECK(res.used_log_domain);
  CHECK(res.converged);
  const auto r = feasibility_residuals(res.plan, half, half, ProblemKind::Wot);
  CHECK(r.col_inf <= 1e-9);
}
