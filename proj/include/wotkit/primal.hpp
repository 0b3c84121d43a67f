#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wotkit/costs.hpp"
#include "wotkit/measures.hpp"

namespace wotkit {

enum class GapMethod { ExactLp, EntropicBound };

std::string gap_method_name(GapMethod m);
GapMethod gap_method_from_name(const std::string& name);

struct PrimalConfig {
  double gamma = 0.1;          // mirror-ascent stepsize
  double tolerance = 1e-3;     // relative gap threshold
  int max_iters = 10000;
  int gap_check_every = 10;
  GapMethod gap_method = GapMethod::ExactLp;
  bool adaptive_gamma = true;  // halve gamma when f drops across a check window
  double entropic_gap_epsilon = 1e-2;
  double sinkhorn_tol = 1e-9;  // WOT projection tightness
  int sinkhorn_max_iters = 10000;
  bool keep_trace = true;
};

struct TracePoint {
  int iter = 0;
  double objective = 0.0;
  double ugap = 0.0;
};

struct SolveReport {
  Coupling plan;
  double objective = 0.0;
  double certified_gap_upper = 0.0;
  int iterations = 0;
  double row_residual_inf = 0.0;
  double col_residual_inf = 0.0;
  bool converged = false;
  bool saturated = false;          // mirror step hit the exponent clamp
  bool absolute_gap_mode = false;  // f <= 0 at some check; absolute test used
  int projection_failures = 0;     // WOT Sinkhorn projections that ran out of iterations
  std::string gradient_mode;       // "analytic" | "finite-difference"
  double gamma_final = 0.0;
  ProblemKind problem = ProblemKind::Wot;
  GapMethod gap_method = GapMethod::ExactLp;
  std::vector<TracePoint> trace;
};

/// f(P) = sum_i a_i F(x_i, P_row_i / a_i)
double objective_f(const Eigen::MatrixXd& P, const Eigen::VectorXd& a,
                   const CostModel& cost);

/// d f / d P_ij = [grad F(x_i, P_row_i / a_i)]_j
Eigen::MatrixXd objective_gradient(const Eigen::MatrixXd& P, const Eigen::VectorXd& a,
                                   const CostModel& cost);

/// Entrywise P_ij * exp(gamma * G_ij); clamped against overflow/underflow.
Eigen::MatrixXd mirror_step(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G,
                            double gamma, bool* saturated = nullptr);

struct UgapResult {
  double upper_bound = 0.0;
  Eigen::MatrixXd witness;
};

/// Linearized gap bound sup_Q <G, Q - P> over the problem's feasible set.
/// WOT solves an OT problem over Pi(a, b) (exactly, or bounded through an
/// entropic solve); WOTUK uses the per-column argmax closed form.
UgapResult ugap(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G,
                const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                ProblemKind problem, GapMethod method,
                double entropic_epsilon = 1e-2);

/// Mirror ascent with per-iteration KL projection and certified stopping:
/// the loop exits once ugap(P) <= tolerance * f(P) at a gap check, and the
/// returned certificate is always re-evaluated at the final plan.
SolveReport solve_primal(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const CostModel& cost, ProblemKind problem,
                         const PrimalConfig& config);

/// Same, with the measures' points attached to the returned plan.
SolveReport solve_primal(const DiscreteMeasure& firms, const DiscreteMeasure& workers,
                         const CostModel& cost, ProblemKind problem,
                         const PrimalConfig& config);

}  // namespace wotkit
