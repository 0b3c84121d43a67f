#pragma once

#include <Eigen/Dense>

namespace wotkit {

struct SinkhornConfig {
  double epsilon = 0.1;        // EOT regularization strength
  int max_iters = 10000;
  double marginal_tol = 1e-9;  // projections; EOT baselines typically use 1e-6
  bool log_domain = false;     // force log-domain scaling updates
};

struct SinkhornResult {
  Eigen::MatrixXd plan;
  // Log-domain scalings: plan_ij = exp(log K_ij + f_i + g_j) for the kernel K
  // that was projected. sinkhorn_eot rescales these by epsilon into the
  // standard entropic dual potentials.
  Eigen::VectorXd potential_f;
  Eigen::VectorXd potential_g;
  int iterations = 0;
  bool converged = false;
  double marginal_error = 0.0;
  bool used_log_domain = false;
};

/// Entropic OT with production matrix C to maximize:
///   max <C, plan> - epsilon * KL(plan | a x b)  over plan in Pi(a, b).
/// Non-convergence returns the best iterate with converged = false.
SinkhornResult sinkhorn_eot(const Eigen::MatrixXd& C, const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b, const SinkhornConfig& config);

/// KL projection of a strictly positive matrix onto Pi(a, b) by Sinkhorn
/// scaling: result = diag(u) P diag(v). Throws on zero or non-finite entries.
SinkhornResult kl_project_couplings(const Eigen::MatrixXd& P, const Eigen::VectorXd& a,
                                    const Eigen::VectorXd& b,
                                    const SinkhornConfig& config);

/// Closed-form KL projection onto {Q >= 0 : Q^T 1 = b}:
///   Q_ij = P_ij * b_j / colsum_j(P).
/// Throws when a column of P sums to zero.
Eigen::MatrixXd kl_project_second_marginal(const Eigen::MatrixXd& P,
                                           const Eigen::VectorXd& b);

/// Closed-form KL projection onto {Q >= 0 : Q 1 = a}: Q = diag(a / P1) P.
/// Throws when a row of P sums to zero.
Eigen::MatrixXd kl_project_first_marginal(const Eigen::MatrixXd& P,
                                          const Eigen::VectorXd& a);

/// KL(Q | R) = sum_ij Q_ij (log(Q_ij / R_ij) - 1) + sum_ij R_ij.
/// Entries with Q_ij = 0 contribute R_ij.
double kl_divergence(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R);

}  // namespace wotkit
