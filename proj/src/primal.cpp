#include "wotkit/primal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wotkit/bregman.hpp"
#include "wotkit/kernels.hpp"
#include "wotkit/simplex.hpp"

namespace wotkit {

std::string gap_method_name(GapMethod m) {
  return m == GapMethod::ExactLp ? "exact_lp" : "entropic_bound";
}

GapMethod gap_method_from_name(const std::string& name) {
  if (name == "exact_lp") return GapMethod::ExactLp;
  if (name == "entropic_bound") return GapMethod::EntropicBound;
  throw std::invalid_argument("unknown gap method: " + name);
}

namespace {

void check_problem_shapes(const Eigen::MatrixXd& P, const Eigen::VectorXd& a,
                          const CostModel& cost) {
  if (P.rows() != a.size() || P.rows() != cost.firm_count() ||
      P.cols() != cost.worker_count()) {
    throw std::invalid_argument("objective: plan/measure/cost shape mismatch");
  }
  if (a.minCoeff() <= 0.0) {
    throw std::invalid_argument("objective: firm weights must be positive");
  }
}

}  // namespace

double objective_f(const Eigen::MatrixXd& P, const Eigen::VectorXd& a,
                   const CostModel& cost) {
  check_problem_shapes(P, a, cost);
  const int n = static_cast<int>(P.rows());
  Eigen::VectorXd terms(n);
  kernels::parallel_for(n, [&](int i) {
    const Eigen::VectorXd p = P.row(i).transpose() / a[i];
    terms[i] = a[i] * cost.value(i, p);
  });
  return terms.sum();  // fixed order, independent of thread count
}

Eigen::MatrixXd objective_gradient(const Eigen::MatrixXd& P, const Eigen::VectorXd& a,
                                   const CostModel& cost) {
  check_problem_shapes(P, a, cost);
  const int n = static_cast<int>(P.rows());
  Eigen::MatrixXd G(P.rows(), P.cols());
  kernels::parallel_for(n, [&](int i) {
    const Eigen::VectorXd p = P.row(i).transpose() / a[i];
    Eigen::VectorXd g;
    cost.gradient(i, p, g);
    G.row(i) = g.transpose();
  });
  return G;
}

Eigen::MatrixXd mirror_step(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G,
                            double gamma, bool* saturated) {
  if (P.rows() != G.rows() || P.cols() != G.cols()) {
    throw std::invalid_argument("mirror_step: shape mismatch");
  }
  Eigen::MatrixXd out;
  const bool clamped = kernels::scaled_exp(P, G, gamma, out);
  if (saturated) *saturated = clamped;
  return out;
}

UgapResult ugap(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G,
                const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                ProblemKind problem, GapMethod method, double entropic_epsilon) {
  if (!G.allFinite()) {
    throw std::invalid_argument("ugap: gradient must be finite");
  }
  const double at_p = (G.array() * P.array()).sum();
  UgapResult res;

  if (problem == ProblemKind::Wotuk) {
    // Q*_ij = b_j on the per-column argmax row (smallest index on ties).
    res.witness = Eigen::MatrixXd::Zero(P.rows(), P.cols());
    double best_total = 0.0;
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      Eigen::Index imax = 0;
      for (Eigen::Index i = 1; i < P.rows(); ++i) {
        if (G(i, j) > G(imax, j)) imax = i;
      }
      res.witness(imax, j) = b[j];
      best_total += b[j] * G(imax, j);
    }
    res.upper_bound = best_total - at_p;
    return res;
  }

  if (method == GapMethod::ExactLp) {
    const OtSolution ot = exact_ot(G, a, b);
    res.witness = ot.plan;
    res.upper_bound = ot.value - at_p;
    return res;
  }

  // Entropic upper bound: max_Q <G,Q> <= V_eps + eps log(min(n,m)) since
  // KL(Q | a x b) <= log(min(n,m)) on Pi(a,b).
  SinkhornConfig cfg;
  cfg.epsilon = entropic_epsilon;
  cfg.marginal_tol = 1e-6;
  const SinkhornResult sk = sinkhorn_eot(G, a, b, cfg);
  const Eigen::MatrixXd product = a * b.transpose();
  const double v_eps = (G.array() * sk.plan.array()).sum() -
                       entropic_epsilon * kl_divergence(sk.plan, product);
  const double slack =
      entropic_epsilon * std::log(static_cast<double>(std::min(P.rows(), P.cols())));
  res.witness = sk.plan;
  res.upper_bound = v_eps + slack - at_p;
  return res;
}

SolveReport solve_primal(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const CostModel& cost, ProblemKind problem,
                         const PrimalConfig& config) {
  if (problem == ProblemKind::Wot && cost.domain() != CostDomain::SimplexScaled) {
    throw std::invalid_argument("solve_primal: WOT needs a simplex-scaled cost");
  }
  if (problem == ProblemKind::Wotuk && cost.domain() != CostDomain::Cone) {
    throw std::invalid_argument("solve_primal: WOTUK needs a cone-domain cost");
  }
  if (a.size() != cost.firm_count() || b.size() != cost.worker_count()) {
    throw std::invalid_argument("solve_primal: measure/cost shape mismatch");
  }
  if (!(config.gamma > 0.0) || !(config.tolerance > 0.0)) {
    throw std::invalid_argument("solve_primal: gamma and tolerance must be positive");
  }

  SolveReport report;
  report.problem = problem;
  report.gap_method = config.gap_method;
  report.gradient_mode = cost.analytic_gradient() ? "analytic" : "finite-difference";

  SinkhornConfig proj;
  proj.marginal_tol = config.sinkhorn_tol;
  proj.max_iters = config.sinkhorn_max_iters;

  Eigen::MatrixXd P = a * b.transpose();
  double gamma = config.gamma;
  double prev_check_f = -std::numeric_limits<double>::infinity();
  bool have_prev_check = false;

  auto gap_threshold = [&](double f) {
    if (f > 0.0) return config.tolerance * f;
    report.absolute_gap_mode = true;
    return config.tolerance;
  };

  int it = 0;
  for (; it < config.max_iters; ++it) {
    Eigen::MatrixXd G = objective_gradient(P, a, cost);

    if (it % config.gap_check_every == 0) {
      const double f = objective_f(P, a, cost);
      const UgapResult ug =
          ugap(P, G, a, b, problem, config.gap_method, config.entropic_gap_epsilon);
      if (config.keep_trace) report.trace.push_back({it, f, ug.upper_bound});
      if (ug.upper_bound <= gap_threshold(f)) {
        report.converged = true;
        break;
      }
      if (config.adaptive_gamma && have_prev_check && f < prev_check_f) {
        gamma *= 0.5;
      }
      prev_check_f = f;
      have_prev_check = true;
    }

    bool clamped = false;
    P = mirror_step(P, G, gamma, &clamped);
    report.saturated = report.saturated || clamped;

    if (problem == ProblemKind::Wot) {
      SinkhornResult pr = kl_project_couplings(P, a, b, proj);
      if (!pr.converged) ++report.projection_failures;
      P = std::move(pr.plan);
    } else {
      P = kl_project_second_marginal(P, b);
    }
  }

  // Re-certify at the final plan regardless of how the loop ended.
  const Eigen::MatrixXd G = objective_gradient(P, a, cost);
  const double f = objective_f(P, a, cost);
  const UgapResult ug =
      ugap(P, G, a, b, problem, config.gap_method, config.entropic_gap_epsilon);
  report.converged = ug.upper_bound <= gap_threshold(f);
  report.objective = f;
  report.certified_gap_upper = ug.upper_bound;
  report.iterations = it;
  report.gamma_final = gamma;
  if (config.keep_trace &&
      (report.trace.empty() || report.trace.back().iter != it)) {
    report.trace.push_back({it, f, ug.upper_bound});
  }

  const FeasibilityResiduals resid = feasibility_residuals(P, a, b, problem);
  report.row_residual_inf = resid.row_inf;
  report.col_residual_inf = resid.col_inf;
  report.plan.matrix = std::move(P);
  return report;
}

SolveReport solve_primal(const DiscreteMeasure& firms, const DiscreteMeasure& workers,
                         const CostModel& cost, ProblemKind problem,
                         const PrimalConfig& config) {
  SolveReport report =
      solve_primal(firms.weights(), workers.weights(), cost, problem, config);
  report.plan.row_points = firms.points();
  report.plan.col_points = workers.points();
  return report;
}

}  // namespace wotkit
