#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

namespace wotkit {

/// Domain of the second argument: a probability vector scaled by row mass
/// (WOT) or an arbitrary nonnegative vector (WOTUK).
enum class CostDomain { SimplexScaled, Cone };

/// Concave production functional over discrete worker kernels. `firm` is an
/// index into the firm list the model was built over; `p` is a nonnegative
/// vector of length worker_count(). Implementations are stateless after
/// construction and safe for concurrent evaluation.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual double value(int firm, const Eigen::VectorXd& p) const = 0;
  virtual void gradient(int firm, const Eigen::VectorXd& p, Eigen::VectorXd& out) const = 0;
  virtual CostDomain domain() const = 0;
  virtual int firm_count() const = 0;
  virtual int worker_count() const = 0;
  /// false when the gradient is produced by finite differences; surfaced in
  /// solver reports.
  virtual bool analytic_gradient() const { return true; }
};

/// CES parameters. Concavity needs sigma <= 1 and zeta <= 1.
struct CesParams {
  double zeta = 0.5;
  double sigma = 0.5;

  CesParams() = default;
  CesParams(double zeta_, double sigma_);
};

/// F((z,a1,a2),(s1,s2)) = z/zeta * (a1 s1^sigma + a2 s2^sigma)^(zeta/sigma)
double ces_value(double z, double alpha1, double alpha2, double s1, double s2,
                 const CesParams& params);

/// dF/ds. Components of s are floored at 1e-30 here only, as a guard against
/// the sigma < 1 singularity at the cone boundary.
Eigen::Vector2d ces_skill_gradient(double z, double alpha1, double alpha2, double s1,
                                   double s2, const CesParams& params);

/// Linear cost: value(i, p) = <F_row_i, p>. The special case reducing WOT to
/// classical OT.
std::unique_ptr<CostModel> linear_cost(const Eigen::MatrixXd& F);

using PointCost = std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXd& s)>;
using PointCostGrad =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& s)>;

/// Cost depending on p only through the aggregate s = sum_j p_j y_j;
/// gradient_j = <grad_s F(x, s), y_j>.
std::unique_ptr<CostModel> barycentric_cost(PointCost F, PointCostGrad dF,
                                            const Eigen::MatrixXd& firm_points,
                                            const Eigen::MatrixXd& worker_points);

/// Same machinery on the cone (p unnormalized).
std::unique_ptr<CostModel> conical_cost(PointCost F, PointCostGrad dF,
                                        const Eigen::MatrixXd& firm_points,
                                        const Eigen::MatrixXd& worker_points);

/// CES production over (z, alpha1, alpha2) firms and 2-d workers, in either
/// domain. Validates alpha1 + alpha2 = 1 per firm.
std::unique_ptr<CostModel> ces_cost(const Eigen::MatrixXd& firm_points,
                                    const Eigen::MatrixXd& worker_points,
                                    const CesParams& params, CostDomain domain);

/// Pointwise production matrix F_ij = F(x_i, y_j) for the OT/EOT baselines.
Eigen::MatrixXd ces_pointwise_matrix(const Eigen::MatrixXd& firm_points,
                                     const Eigen::MatrixXd& worker_points,
                                     const CesParams& params);

}  // namespace wotkit
