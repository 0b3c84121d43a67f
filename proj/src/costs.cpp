#include "wotkit/costs.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace wotkit {

CesParams::CesParams(double zeta_, double sigma_) : zeta(zeta_), sigma(sigma_) {
  if (!(zeta > 0.0 && zeta <= 1.0) || !(sigma > 0.0 && sigma <= 1.0)) {
    throw std::invalid_argument("CesParams: zeta and sigma must lie in (0, 1]");
  }
}

double ces_value(double z, double alpha1, double alpha2, double s1, double s2,
                 const CesParams& params) {
  if (s1 < 0.0 || s2 < 0.0) {
    throw std::domain_error("ces_value: negative skill component");
  }
  if (std::abs(alpha1 + alpha2 - 1.0) > 1e-9) {
    throw std::invalid_argument("ces_value: alpha1 + alpha2 must equal 1");
  }
  const double inner =
      alpha1 * std::pow(s1, params.sigma) + alpha2 * std::pow(s2, params.sigma);
  return z / params.zeta * std::pow(inner, params.zeta / params.sigma);
}

Eigen::Vector2d ces_skill_gradient(double z, double alpha1, double alpha2, double s1,
                                   double s2, const CesParams& params) {
  const double f1 = std::max(s1, 1e-30);
  const double f2 = std::max(s2, 1e-30);
  const double inner =
      alpha1 * std::pow(f1, params.sigma) + alpha2 * std::pow(f2, params.sigma);
  const double outer = std::pow(inner, params.zeta / params.sigma - 1.0);
  Eigen::Vector2d g;
  g[0] = z * alpha1 * std::pow(f1, params.sigma - 1.0) * outer;
  g[1] = z * alpha2 * std::pow(f2, params.sigma - 1.0) * outer;
  return g;
}

namespace {

class LinearCost final : public CostModel {
 public:
  explicit LinearCost(Eigen::MatrixXd F) : F_(std::move(F)) {
    if (!F_.allFinite()) {
      throw std::invalid_argument("linear_cost: matrix must be finite");
    }
  }

  double value(int firm, const Eigen::VectorXd& p) const override {
    return F_.row(firm).dot(p);
  }

  void gradient(int firm, const Eigen::VectorXd&, Eigen::VectorXd& out) const override {
    out = F_.row(firm).transpose();
  }

  CostDomain domain() const override { return CostDomain::SimplexScaled; }
  int firm_count() const override { return static_cast<int>(F_.rows()); }
  int worker_count() const override { return static_cast<int>(F_.cols()); }

 private:
  Eigen::MatrixXd F_;
};

// Barycentric/conical aggregate cost: everything flows through
// s = sum_j p_j y_j and the chain rule.
class AggregateCost final : public CostModel {
 public:
  AggregateCost(PointCost F, PointCostGrad dF, Eigen::MatrixXd firm_points,
                Eigen::MatrixXd worker_points, CostDomain domain)
      : F_(std::move(F)),
        dF_(std::move(dF)),
        firms_(std::move(firm_points)),
        workers_(std::move(worker_points)),
        domain_(domain) {}

  double value(int firm, const Eigen::VectorXd& p) const override {
    return F_(firms_.row(firm).transpose(), aggregate(p));
  }

  void gradient(int firm, const Eigen::VectorXd& p, Eigen::VectorXd& out) const override {
    const Eigen::VectorXd gs = dF_(firms_.row(firm).transpose(), aggregate(p));
    out.noalias() = workers_ * gs;
  }

  CostDomain domain() const override { return domain_; }
  int firm_count() const override { return static_cast<int>(firms_.rows()); }
  int worker_count() const override { return static_cast<int>(workers_.rows()); }

 private:
  Eigen::VectorXd aggregate(const Eigen::VectorXd& p) const {
    return workers_.transpose() * p;
  }

  PointCost F_;
  PointCostGrad dF_;
  Eigen::MatrixXd firms_;
  Eigen::MatrixXd workers_;
  CostDomain domain_;
};

void check_firm_worker_shapes(const Eigen::MatrixXd& firm_points,
                              const Eigen::MatrixXd& worker_points) {
  if (firm_points.rows() < 1 || worker_points.rows() < 1) {
    throw std::invalid_argument("cost model: empty firm or worker set");
  }
}

}  // namespace

std::unique_ptr<CostModel> linear_cost(const Eigen::MatrixXd& F) {
  return std::make_unique<LinearCost>(F);
}

std::unique_ptr<CostModel> barycentric_cost(PointCost F, PointCostGrad dF,
                                            const Eigen::MatrixXd& firm_points,
                                            const Eigen::MatrixXd& worker_points) {
  check_firm_worker_shapes(firm_points, worker_points);
  return std::make_unique<AggregateCost>(std::move(F), std::move(dF), firm_points,
                                         worker_points, CostDomain::SimplexScaled);
}

std::unique_ptr<CostModel> conical_cost(PointCost F, PointCostGrad dF,
                                        const Eigen::MatrixXd& firm_points,
                                        const Eigen::MatrixXd& worker_points) {
  check_firm_worker_shapes(firm_points, worker_points);
  return std::make_unique<AggregateCost>(std::move(F), std::move(dF), firm_points,
                                         worker_points, CostDomain::Cone);
}

std::unique_ptr<CostModel> ces_cost(const Eigen::MatrixXd& firm_points,
                                    const Eigen::MatrixXd& worker_points,
                                    const CesParams& params, CostDomain domain) {
  check_firm_worker_shapes(firm_points, worker_points);
  if (firm_points.cols() != 3) {
    throw std::invalid_argument("ces_cost: firm points must be (z, alpha1, alpha2)");
  }
  if (worker_points.cols() != 2) {
    throw std::invalid_argument("ces_cost: worker points must be (x1, x2)");
  }
  for (Eigen::Index i = 0; i < firm_points.rows(); ++i) {
    if (std::abs(firm_points(i, 1) + firm_points(i, 2) - 1.0) > 1e-9) {
      throw std::invalid_argument("ces_cost: alpha1 + alpha2 must equal 1 per firm");
    }
  }
  PointCost F = [params](const Eigen::VectorXd& x, const Eigen::VectorXd& s) {
    return ces_value(x[0], x[1], x[2], std::max(s[0], 0.0), std::max(s[1], 0.0), params);
  };
  PointCostGrad dF = [params](const Eigen::VectorXd& x, const Eigen::VectorXd& s) {
    Eigen::VectorXd g = ces_skill_gradient(x[0], x[1], x[2], s[0], s[1], params);
    return g;
  };
  auto cost = std::make_unique<AggregateCost>(std::move(F), std::move(dF), firm_points,
                                              worker_points, domain);
  return cost;
}

Eigen::MatrixXd ces_pointwise_matrix(const Eigen::MatrixXd& firm_points,
                                     const Eigen::MatrixXd& worker_points,
                                     const CesParams& params) {
  Eigen::MatrixXd C(firm_points.rows(), worker_points.rows());
  for (Eigen::Index i = 0; i < firm_points.rows(); ++i) {
    for (Eigen::Index j = 0; j < worker_points.rows(); ++j) {
      C(i, j) = ces_value(firm_points(i, 0), firm_points(i, 1), firm_points(i, 2),
                          worker_points(j, 0), worker_points(j, 1), params);
    }
  }
  return C;
}

}  // namespace wotkit
