#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace wotkit {

/// maximize objective . x
///   subject to  ineq_A x <= ineq_b,  eq_A x = eq_b,
///   x_j >= 0 where nonneg[j] (free otherwise; empty means all nonnegative).
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd ineq_A;
  Eigen::VectorXd ineq_b;
  Eigen::MatrixXd eq_A;
  Eigen::VectorXd eq_b;
  std::vector<bool> nonneg;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd ineq_duals;  // multipliers of ineq_A x <= ineq_b
  Eigen::VectorXd eq_duals;    // multipliers of eq_A x = eq_b
  double complementarity_residual = 0.0;
  int pivots = 0;
};

/// Dense two-phase primal simplex, Bland's rule throughout (smallest entering
/// index; leaving-row ties broken by smallest basic index). The final basic
/// solution and duals are recomputed from the original constraint system so
/// marginal and complementary-slackness residuals track machine precision.
LpSolution lp_solve(const LinearProgram& prob);

struct OtSolution {
  double value = 0.0;
  Eigen::MatrixXd plan;
  Eigen::VectorXd row_duals;
  Eigen::VectorXd col_duals;
};

/// Exact transport LP: maximize <C, P> over {P >= 0, P1 = a, P^T 1 = b}.
OtSolution exact_ot(const Eigen::MatrixXd& C, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b);

enum class PsiMode { Barycentric, Conical };
enum class PsiStatus { Optimal, Infeasible };

/// One evaluation of the wage minorant psi at a point z. `lambda` is the LP
/// maximizer and equals the gradient of psi at z when the optimum is unique;
/// `mu` is absent in conical mode. Infeasible means z lies outside
/// conv(worker_points) (resp. cone(worker_points)).
struct PsiEvaluation {
  double value = 0.0;
  Eigen::VectorXd lambda;
  std::optional<double> mu;
  PsiStatus status = PsiStatus::Infeasible;
};

/// psi(z) = max <lambda, z> + mu  s.t. <lambda, y_j> + mu <= phi_j for all j.
PsiEvaluation psi_barycentric(const Eigen::VectorXd& phi,
                              const Eigen::MatrixXd& worker_points,
                              const Eigen::VectorXd& z);

/// psi(z) = max <lambda, z>  s.t. <lambda, y_j> <= phi_j for all j.
PsiEvaluation psi_conical(const Eigen::VectorXd& phi,
                          const Eigen::MatrixXd& worker_points,
                          const Eigen::VectorXd& z);

}  // namespace wotkit
