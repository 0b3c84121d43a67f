#pragma once

#include <Eigen/Dense>
#include <functional>

// Data-parallel inner loops shared by the solvers. Each kernel writes every
// output slot exactly once and keeps a fixed per-slot summation order, so the
// OpenMP variants are bitwise identical to the serial reference regardless of
// thread count. `wotkit::kernels::reference` holds the serial twins used by
// the equivalence tests and the benchmark baseline.

namespace wotkit::kernels {

/// Thread cap: OpenMP's max, further capped by WOTKIT_THREADS when set.
int max_threads();

/// Exponent clamp for the multiplicative update; exp(700) is still finite
/// and exp(-700) is still a positive normal double.
inline constexpr double kExpClamp = 700.0;

/// out_ij = P_ij * exp(gamma * G_ij). When the plain product would leave the
/// finite positive range, the entry is recomputed as exp(log P_ij + gamma
/// G_ij) with the exponent clamped to [-kExpClamp, kExpClamp]. Returns true
/// when any entry was clamped.
bool scaled_exp(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G, double gamma,
                Eigen::MatrixXd& out);

/// y = M v, parallel over rows.
void matvec(const Eigen::MatrixXd& M, const Eigen::VectorXd& v, Eigen::VectorXd& y);

/// y = M^T v, parallel over columns.
void matvec_transpose(const Eigen::MatrixXd& M, const Eigen::VectorXd& v,
                      Eigen::VectorXd& y);

/// out_i = logsumexp_j (L_ij + g_j)
void row_logsumexp(const Eigen::MatrixXd& L, const Eigen::VectorXd& g,
                   Eigen::VectorXd& out);

/// out_j = logsumexp_i (L_ij + f_i)
void col_logsumexp(const Eigen::MatrixXd& L, const Eigen::VectorXd& f,
                   Eigen::VectorXd& out);

/// Runs fn(i) for i in [0, n), parallel across i. fn must only write state
/// owned by index i. Exceptions are captured and rethrown on the caller
/// thread (first one wins).
void parallel_for(int n, const std::function<void(int)>& fn);

namespace reference {

bool scaled_exp(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G, double gamma,
                Eigen::MatrixXd& out);
void matvec(const Eigen::MatrixXd& M, const Eigen::VectorXd& v, Eigen::VectorXd& y);
void matvec_transpose(const Eigen::MatrixXd& M, const Eigen::VectorXd& v,
                      Eigen::VectorXd& y);
void row_logsumexp(const Eigen::MatrixXd& L, const Eigen::VectorXd& g,
                   Eigen::VectorXd& out);
void col_logsumexp(const Eigen::MatrixXd& L, const Eigen::VectorXd& f,
                   Eigen::VectorXd& out);

}  // namespace reference

}  // namespace wotkit::kernels
