#include "wotkit/labor_market.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wotkit/kernels.hpp"

namespace wotkit {

namespace {

Eigen::VectorXd linspace(double lo, double hi, int count) {
  Eigen::VectorXd v(count);
  if (count == 1) {
    v[0] = lo;
    return v;
  }
  for (int i = 0; i < count; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return v;
}

}  // namespace

ScenarioKind scenario_from_name(const std::string& name) {
  if (name == "A" || name == "a") return ScenarioKind::A;
  if (name == "B" || name == "b") return ScenarioKind::B;
  throw std::invalid_argument("unknown scenario kind: " + name);
}

std::string scenario_name(ScenarioKind k) { return k == ScenarioKind::A ? "A" : "B"; }

Scenario make_scenario(ScenarioKind kind, int n, int m, double kappa, double z_min,
                       double z_max) {
  if (n < 2 || m < 2) {
    throw std::invalid_argument("make_scenario: need at least 2 firms and 2 workers");
  }
  if (kappa < 0.0) {
    throw std::invalid_argument("make_scenario: kappa must be nonnegative");
  }

  const double quarter = std::numbers::pi / 4.0;

  Eigen::MatrixXd firm_pts(n, 3);
  const Eigen::VectorXd alpha2 = linspace(0.0, 1.0, n);
  const Eigen::VectorXd z = linspace(z_min, z_max, n);
  for (int i = 0; i < n; ++i) {
    firm_pts(i, 0) = z[i];
    firm_pts(i, 1) = 1.0 - alpha2[i];
    firm_pts(i, 2) = alpha2[i];
  }
  const Eigen::VectorXd firm_w = Eigen::VectorXd::Constant(n, 1.0 / n);

  Eigen::MatrixXd worker_pts(m, 2);
  Eigen::VectorXd worker_w(m);
  const Eigen::VectorXd theta = linspace(0.0, 2.0 * quarter, m);
  for (int j = 0; j < m; ++j) {
    worker_pts(j, 0) = std::cos(theta[j]);
    worker_pts(j, 1) = std::sin(theta[j]);
    const double spread = std::abs(theta[j] - quarter) / quarter;
    worker_w[j] = kind == ScenarioKind::A ? 1.0 + kappa * spread
                                          : 1.0 + kappa * (1.0 - spread);
  }

  return Scenario{DiscreteMeasure(firm_pts, firm_w),
                  DiscreteMeasure(worker_pts, worker_w)};
}

std::vector<std::pair<double, double>> alpha_to_theta(const Eigen::MatrixXd& plan,
                                                      const DiscreteMeasure& firms,
                                                      const DiscreteMeasure& workers,
                                                      double mass_floor) {
  if (plan.rows() != firms.size() || plan.cols() != workers.size()) {
    throw std::invalid_argument("alpha_to_theta: plan/measure shape mismatch");
  }
  if (firms.dim() != 3 || workers.dim() != 2) {
    throw std::invalid_argument("alpha_to_theta: needs (z,a1,a2) firms, 2-d workers");
  }
  std::vector<std::pair<double, double>> out;
  out.reserve(plan.rows());
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    if (plan.row(i).sum() <= mass_floor) continue;  // zero-mass firm, skipped
    const Eigen::Vector2d s = workers.points().transpose() * plan.row(i).transpose();
    out.emplace_back(firms.points()(i, 2), std::atan2(s[1], s[0]));
  }
  return out;
}

PsiGrid wage_surface(const WageFunction& wage, int resolution, double radius) {
  if (resolution < 2 || !(radius > 0.0)) {
    throw std::invalid_argument("wage_surface: bad grid spec");
  }
  PsiGrid grid;
  grid.x1 = linspace(0.0, radius, resolution);
  grid.x2 = linspace(0.0, radius, resolution);
  grid.values.setZero(resolution, resolution);
  grid.feasible.setConstant(resolution, resolution, false);

  kernels::parallel_for(resolution * resolution, [&](int cell) {
    const int i = cell / resolution;
    const int j = cell % resolution;
    Eigen::VectorXd zpt(2);
    zpt << grid.x1[i], grid.x2[j];
    const PsiEvaluation ev = wage.psi(zpt);
    if (ev.status == PsiStatus::Optimal) {
      grid.values(i, j) = ev.value;
      grid.feasible(i, j) = true;
    }
  });
  return grid;
}

double convexity_gap(const WageFunction& wage, const std::vector<Segment>& segments) {
  double worst = 0.0;
  bool any = false;
  for (const Segment& seg : segments) {
    const PsiEvaluation eu = wage.psi(seg.u);
    const PsiEvaluation ev = wage.psi(seg.v);
    if (eu.status != PsiStatus::Optimal || ev.status != PsiStatus::Optimal) continue;
    const PsiEvaluation em = wage.psi(((seg.u + seg.v) / 2.0).eval());
    if (em.status != PsiStatus::Optimal) continue;
    worst = std::max(worst, 0.5 * (eu.value + ev.value) - em.value);
    any = true;
  }
  if (!any) {
    throw std::invalid_argument("convexity_gap: no feasible segment");
  }
  return worst;
}

std::vector<Segment> spanning_segments(const Eigen::MatrixXd& worker_points, int count) {
  const Eigen::Index m = worker_points.rows();
  if (m < 2 || count < 1) {
    throw std::invalid_argument("spanning_segments: need >= 2 points and count >= 1");
  }
  std::vector<Segment> segs;
  segs.reserve(count);
  for (int k = 0; k < count; ++k) {
    // Chords between symmetric picks, progressively narrowing toward the
    // middle of the arc.
    const Eigen::Index lo =
        static_cast<Eigen::Index>(static_cast<long long>(k) * (m / 2) / count);
    const Eigen::Index hi = m - 1 - lo;
    if (lo >= hi) break;
    segs.push_back({worker_points.row(lo).transpose(), worker_points.row(hi).transpose()});
  }
  return segs;
}

}  // namespace wotkit
