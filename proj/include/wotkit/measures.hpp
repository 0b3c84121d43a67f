#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace wotkit {

/// Discrete probability measure: a weighted point cloud in R^d.
/// Weights are strictly positive and renormalized to sum to one on
/// construction (at most once; already-normalized input is kept as-is).
class DiscreteMeasure {
 public:
  DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights);

  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index size() const { return weights_.size(); }
  Eigen::Index dim() const { return points_.cols(); }

 private:
  Eigen::MatrixXd points_;   // size x dim, one point per row
  Eigen::VectorXd weights_;  // > 0, sums to 1 within 1e-12
};

enum class ProblemKind { Wot, Wotuk };

std::string problem_name(ProblemKind p);
ProblemKind problem_from_name(const std::string& name);

/// Matching plan between firm and worker types. Row/column point blocks are
/// optional metadata attached by the solvers for reporting.
struct Coupling {
  Eigen::MatrixXd matrix;      // n x m, entries >= 0
  Eigen::MatrixXd row_points;  // n x p (empty when unknown)
  Eigen::MatrixXd col_points;  // m x q (empty when unknown)
};

Eigen::VectorXd row_sums(const Eigen::MatrixXd& P);
Eigen::VectorXd col_sums(const Eigen::MatrixXd& P);

struct FeasibilityResiduals {
  double row_inf = 0.0;
  double col_inf = 0.0;
};

/// Infinity-norm marginal violations. For WOTUK the first marginal is free,
/// so the row residual is reported as zero by convention.
FeasibilityResiduals feasibility_residuals(const Eigen::MatrixXd& P,
                                           const Eigen::VectorXd& a,
                                           const Eigen::VectorXd& b,
                                           ProblemKind problem);

/// Firm sizes N_i = (row sum of P) / a_i. All ones for WOT-feasible plans.
Eigen::VectorXd firm_sizes(const Eigen::MatrixXd& P, const Eigen::VectorXd& a);

// --- CSV interchange ---------------------------------------------------
//
// Measure schema: one coordinate column per dimension plus a trailing
// `weight` column. Firms use `z,alpha1,alpha2,weight`, workers
// `x1,x2,weight`, generic measures `c1,...,cd,weight`. Plans are dense CSV
// with a header row of worker indices. All doubles are written with 17
// significant digits so a read-back is bit-stable.

DiscreteMeasure read_measure_csv(const std::string& path);
void write_measure_csv(const std::string& path, const DiscreteMeasure& m,
                       const std::vector<std::string>& coord_names);

Eigen::MatrixXd read_plan_csv(const std::string& path);
void write_plan_csv(const std::string& path, const Eigen::MatrixXd& P);

std::vector<std::string> firm_coord_names();
std::vector<std::string> worker_coord_names();
std::vector<std::string> generic_coord_names(int dim);

/// "%.17g" rendering used by every CSV writer.
std::string format_double(double v);

}  // namespace wotkit
