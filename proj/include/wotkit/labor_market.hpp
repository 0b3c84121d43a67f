#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wotkit/dual.hpp"
#include "wotkit/measures.hpp"

namespace wotkit {

enum class ScenarioKind { A, B };

ScenarioKind scenario_from_name(const std::string& name);
std::string scenario_name(ScenarioKind k);

struct Scenario {
  DiscreteMeasure firms;    // (z, alpha1, alpha2), uniform weights
  DiscreteMeasure workers;  // (cos theta, sin theta) on the quarter circle
};

/// Two-skill economy: n firms with alpha2 on linspace(0,1,n), z on
/// linspace(z_min, z_max, n), uniform weights; m workers on the unit quarter
/// circle with theta on linspace(0, pi/2, m). Scenario A piles weight on the
/// specialists (b_j proportional to 1 + kappa |theta - pi/4| / (pi/4)),
/// scenario B on the generalists (1 + kappa (1 - |theta - pi/4| / (pi/4))).
Scenario make_scenario(ScenarioKind kind, int n, int m, double kappa,
                       double z_min = 1.0, double z_max = 1.0);

/// One (alpha2, theta_bar) pair per firm with row mass above mass_floor,
/// where theta_bar = arctan(s2/s1) of the aggregate employee skill
/// s = sum_j P_ij y_j. Zero-mass rows are skipped.
std::vector<std::pair<double, double>> alpha_to_theta(const Eigen::MatrixXd& plan,
                                                      const DiscreteMeasure& firms,
                                                      const DiscreteMeasure& workers,
                                                      double mass_floor = 1e-12);

struct PsiGrid {
  Eigen::VectorXd x1;              // grid coordinates, size res
  Eigen::VectorXd x2;
  Eigen::MatrixXd values;          // res x res, row = x1 index
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> feasible;
};

/// psi evaluated on a res x res grid over [0, radius]^2; cells outside the
/// hull/cone are flagged infeasible. Cells are independent LPs and run in
/// parallel.
PsiGrid wage_surface(const WageFunction& wage, int resolution, double radius);

struct Segment {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

/// max over segments of (psi(u) + psi(v))/2 - psi((u+v)/2); segments with an
/// infeasible endpoint or midpoint are skipped. Nonnegative up to LP
/// tolerance since psi is convex.
double convexity_gap(const WageFunction& wage, const std::vector<Segment>& segments);

/// Deterministic segment set spanning the quarter disc: chords y_j -- y_{m-1-j}
/// between arc points (midpoints lie inside the hull).
std::vector<Segment> spanning_segments(const Eigen::MatrixXd& worker_points, int count);

}  // namespace wotkit
