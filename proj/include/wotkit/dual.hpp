#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wotkit/costs.hpp"
#include "wotkit/measures.hpp"
#include "wotkit/simplex.hpp"

namespace wotkit {

enum class PhiInit { Ones, WarmStart };

struct DualConfig {
  double gamma1 = 0.1;   // inner mirror-ascent stepsize (on P)
  double gamma2 = 0.05;  // outer mirror-descent stepsize (on phi)
  int k1 = 500;          // outer iterations
  int k2 = 50;           // inner iterations per outer step
  PhiInit phi_init = PhiInit::Ones;
  int k2_final = 2000;       // inner iterations for the final certification
  double h_ceiling = 1e6;    // inner divergence detector (WOTUK)
  bool outer_stop = true;    // optional early exit on small outer gradient
  double outer_stop_tol = 1e-6;
};

/// Dual wage pair: pointwise wages phi at worker types and the convex (and,
/// in conical mode, positively homogeneous) minorant psi evaluated by LP.
class WageFunction {
 public:
  WageFunction(Eigen::VectorXd phi, Eigen::MatrixXd worker_points, PsiMode mode);

  const Eigen::VectorXd& phi() const { return phi_; }
  const Eigen::VectorXd& psi_values() const { return psi_values_; }
  PsiMode mode() const { return mode_; }
  const Eigen::MatrixXd& worker_points() const { return worker_points_; }

  /// psi(z) at an arbitrary point; infeasible status outside the hull/cone.
  PsiEvaluation psi(const Eigen::VectorXd& z) const;

 private:
  Eigen::VectorXd phi_;
  Eigen::VectorXd psi_values_;
  PsiMode mode_;
  Eigen::MatrixXd worker_points_;
};

/// Builds the WageFunction for given wages: psi at every worker type plus an
/// evaluator closing over (phi, worker_points).
WageFunction recover_psi(const Eigen::VectorXd& phi, const Eigen::MatrixXd& worker_points,
                         PsiMode mode);

/// h(phi, P) = f(P) - sum_ij P_ij phi_j
double h_value(const Eigen::VectorXd& phi, const Eigen::MatrixXd& P,
               const Eigen::VectorXd& a, const CostModel& cost);

/// grad_P h = grad f(P) - 1 phi^T
Eigen::MatrixXd h_gradient_P(const Eigen::VectorXd& phi, const Eigen::MatrixXd& P,
                             const Eigen::VectorXd& a, const CostModel& cost);

struct DualReport {
  WageFunction wages;
  double dual_objective = 0.0;  // <b, phi> + certified inner maximum
  Eigen::MatrixXd inner_plan;   // last inner iterate
  double inner_h = 0.0;         // certified inner maximum of h
  double outer_residual_inf = 0.0;  // ||b - P^T 1||_inf at exit
  int outer_iterations = 0;
  int divergence_events = 0;  // inner h exceeded the ceiling (WOTUK)
  // the running average of the outer iterates certified better than the last
  bool used_averaged_phi = false;
};

/// Nested mirror scheme: mirror descent on phi with an inner mirror ascent
/// on P at fixed phi (row-reweighting projection for WOT, unconstrained for
/// WOTUK), then LP recovery of psi over the worker geometry. The reported
/// dual objective re-solves the inner problem from a fresh start with
/// k2_final iterations.
DualReport solve_dual(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                      const Eigen::MatrixXd& worker_points, const CostModel& cost,
                      ProblemKind problem, const DualConfig& config);

DualReport solve_dual(const DiscreteMeasure& firms, const DiscreteMeasure& workers,
                      const CostModel& cost, ProblemKind problem,
                      const DualConfig& config);

}  // namespace wotkit
