#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "wotkit/measures.hpp"

using namespace wotkit;

namespace {

DiscreteMeasure tiny_measure(std::initializer_list<double> weights) {
  const int n = static_cast<int>(weights.size());
  Eigen::MatrixXd pts(n, 1);
  Eigen::VectorXd w(n);
  int i = 0;
  for (double v : weights) {
    pts(i, 0) = i;
    w[i] = v;
    ++i;
  }
  return DiscreteMeasure(pts, w);
}

}  // namespace

TEST_CASE("measure weights renormalize once and stay positive") {
  const DiscreteMeasure m = tiny_measure({2.0, 3.0, 5.0});
  CHECK(m.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.weights()[0] == doctest::Approx(0.2));
  CHECK(m.weights().minCoeff() > 0.0);
}

TEST_CASE("measure rejects bad weights") {
  Eigen::MatrixXd pts(2, 1);
  pts << 0.0, 1.0;
  Eigen::VectorXd zero_w(2), neg_w(2);
  zero_w << 0.0, 1.0;
  neg_w << -0.5, 1.5;
  CHECK_THROWS_AS(DiscreteMeasure(pts, zero_w), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure(pts, neg_w), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteMeasure(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)),
                  std::invalid_argument);
}

TEST_CASE("row and column sums") {
  Eigen::MatrixXd P(2, 2);

  SUBCASE("symmetric quarter matrix") {
    P << 0.25, 0.25, 0.25, 0.25;
    CHECK(row_sums(P).isApprox(Eigen::Vector2d(0.5, 0.5)));
    CHECK(col_sums(P).isApprox(Eigen::Vector2d(0.5, 0.5)));
  }

  SUBCASE("product coupling recovers the marginals") {
    Eigen::Vector2d a(0.3, 0.7), b(0.6, 0.4);
    P = a * b.transpose();
    CHECK(row_sums(P).isApprox(a, 1e-15));
    CHECK(col_sums(P).isApprox(b, 1e-15));
  }

  SUBCASE("hand arithmetic") {
    P << 1, 2, 3, 4;
    CHECK(row_sums(P).isApprox(Eigen::Vector2d(3, 7)));
    CHECK(col_sums(P).isApprox(Eigen::Vector2d(4, 6)));
  }
}

TEST_CASE("feasibility residuals") {
  Eigen::Vector2d a(0.3, 0.7), b(0.6, 0.4);
  const Eigen::MatrixXd P = a * b.transpose();

  SUBCASE("product coupling is feasible") {
    const auto r = feasibility_residuals(P, a, b, ProblemKind::Wot);
    CHECK(r.row_inf == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.col_inf == doctest::Approx(0.0).epsilon(1e-15));
  }

  SUBCASE("doubling shifts residuals by the marginal norms") {
    const auto r = feasibility_residuals(2.0 * P, a, b, ProblemKind::Wot);
    CHECK(r.row_inf == doctest::Approx(a.lpNorm<Eigen::Infinity>()));
    CHECK(r.col_inf == doctest::Approx(b.lpNorm<Eigen::Infinity>()));
  }

  SUBCASE("self-consistency for a random positive matrix") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    Eigen::MatrixXd Q(3, 4);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 4; ++j) Q(i, j) = unif(rng);
    const auto r =
        feasibility_residuals(Q, row_sums(Q), col_sums(Q), ProblemKind::Wot);
    CHECK(r.row_inf <= 1e-15);
    CHECK(r.col_inf <= 1e-15);
  }

  SUBCASE("wotuk reports zero row residual by convention") {
    const auto r = feasibility_residuals(2.0 * P, a, b, ProblemKind::Wotuk);
    CHECK(r.row_inf == 0.0);
    CHECK(r.col_inf > 0.0);
  }

  SUBCASE("shape mismatch throws") {
    CHECK_THROWS_AS(feasibility_residuals(P, Eigen::Vector3d::Ones(), b, ProblemKind::Wot),
                    std::invalid_argument);
  }
}

TEST_CASE("firm sizes") {
  Eigen::Vector2d a(0.5, 0.5);

  SUBCASE("wot-feasible plans have unit sizes") {
    Eigen::Vector2d b(0.6, 0.4);
    const Eigen::MatrixXd P = a * b.transpose();
    CHECK(firm_sizes(P, a).isApprox(Eigen::Vector2d::Ones(), 1e-14));
  }

  SUBCASE("hand arithmetic") {
    Eigen::MatrixXd P(2, 2);
    P << 0.2, 0.2, 0.3, 0.3;
    CHECK(firm_sizes(P, a).isApprox(Eigen::Vector2d(0.8, 1.2)));
  }

  SUBCASE("zero row gives zero size") {
    Eigen::MatrixXd P(2, 2);
    P << 0.0, 0.0, 0.5, 0.5;
    CHECK(firm_sizes(P, a)[0] == 0.0);
  }

  SUBCASE("sizes weighted by a sum to one when columns match b") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    Eigen::MatrixXd P(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) P(i, j) = unif(rng);
    P /= P.sum();  // total mass one => col_sums(P) = some b summing to one
    CHECK(firm_sizes(P, a).dot(a) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("csv round trip is bit-stable") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unif(1e-9, 1.0);
  Eigen::MatrixXd pts(5, 2);
  Eigen::VectorXd w(5);
  for (int i = 0; i < 5; ++i) {
    pts(i, 0) = unif(rng) * 1e3;
    pts(i, 1) = unif(rng) * 1e-6;
    w[i] = unif(rng);
  }
  const DiscreteMeasure m(pts, w);

  const auto dir = std::filesystem::temp_directory_path() / "wotkit_measures_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "m.csv").string();
  write_measure_csv(path, m, worker_coord_names());
  const DiscreteMeasure back = read_measure_csv(path);

  REQUIRE(back.size() == m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    CHECK(back.weights()[i] == m.weights()[i]);  // bitwise
    CHECK(back.points()(i, 0) == m.points()(i, 0));
    CHECK(back.points()(i, 1) == m.points()(i, 1));
  }

  const std::string plan_path = (dir / "p.csv").string();
  Eigen::MatrixXd P(2, 3);
  P << 0.125, 1.0 / 3.0, 1e-17, 0.375, 2.0 / 3.0, 5e300;
  write_plan_csv(plan_path, P);
  const Eigen::MatrixXd Q = read_plan_csv(plan_path);
  REQUIRE(Q.rows() == 2);
  REQUIRE(Q.cols() == 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(Q(i, j) == P(i, j));  // bitwise
}

TEST_CASE("missing measure file names the path") {
  try {
    read_measure_csv("/nonexistent/firms.csv");
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/firms.csv") != std::string::npos);
  }
}
