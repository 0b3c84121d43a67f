#include "wotkit/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wotkit {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kTinyPivot = 1e-12;
constexpr double kStrongImprove = 1e-7;
constexpr double kPhase1Tol = 1e-8;
constexpr int kMaxPivots = 200000;

// Transformed standard form: T x = rhs with rhs >= 0 and x >= 0.
// Column layout: [split original vars | ineq slacks | artificials at the end].
struct Standardized {
  Eigen::MatrixXd T;          // rows x n_std (no artificial columns)
  Eigen::VectorXd rhs;        // >= 0
  Eigen::VectorXd cost;       // phase-2 cost per standard column
  Eigen::VectorXd row_sign;   // +-1: original row was negated when -1
  std::vector<int> var_of;    // std column -> original variable (-1 for slack)
  std::vector<double> sign_of;  // contribution sign of the split part
  int n_rows = 0;
  int n_ineq = 0;
  int n_std = 0;
};

Standardized standardize(const LinearProgram& prob) {
  const int n_vars = static_cast<int>(prob.objective.size());
  const int n_ineq = static_cast<int>(prob.ineq_b.size());
  const int n_eq = static_cast<int>(prob.eq_b.size());

  if (prob.ineq_A.rows() != n_ineq || (n_ineq > 0 && prob.ineq_A.cols() != n_vars)) {
    throw std::invalid_argument("lp_solve: inequality block dimension mismatch");
  }
  if (prob.eq_A.rows() != n_eq || (n_eq > 0 && prob.eq_A.cols() != n_vars)) {
    throw std::invalid_argument("lp_solve: equality block dimension mismatch");
  }
  if (!prob.nonneg.empty() && static_cast<int>(prob.nonneg.size()) != n_vars) {
    throw std::invalid_argument("lp_solve: sign restriction length mismatch");
  }
  if (!prob.objective.allFinite() ||
      (n_ineq > 0 && (!prob.ineq_A.allFinite() || !prob.ineq_b.allFinite())) ||
      (n_eq > 0 && (!prob.eq_A.allFinite() || !prob.eq_b.allFinite()))) {
    throw std::invalid_argument("lp_solve: coefficients must be finite");
  }

  auto is_nonneg = [&](int j) { return prob.nonneg.empty() || prob.nonneg[j]; };

  Standardized s;
  s.n_rows = n_ineq + n_eq;
  s.n_ineq = n_ineq;

  int n_split = 0;
  for (int j = 0; j < n_vars; ++j) n_split += is_nonneg(j) ? 1 : 2;
  s.n_std = n_split + n_ineq;

  s.T = Eigen::MatrixXd::Zero(s.n_rows, s.n_std);
  s.rhs.resize(s.n_rows);
  s.cost = Eigen::VectorXd::Zero(s.n_std);
  s.row_sign = Eigen::VectorXd::Ones(s.n_rows);
  s.var_of.assign(s.n_std, -1);
  s.sign_of.assign(s.n_std, 1.0);

  int col = 0;
  for (int j = 0; j < n_vars; ++j) {
    for (int part = 0; part < (is_nonneg(j) ? 1 : 2); ++part) {
      const double sgn = part == 0 ? 1.0 : -1.0;
      for (int r = 0; r < n_ineq; ++r) s.T(r, col) = sgn * prob.ineq_A(r, j);
      for (int r = 0; r < n_eq; ++r) s.T(n_ineq + r, col) = sgn * prob.eq_A(r, j);
      s.cost[col] = sgn * prob.objective[j];
      s.var_of[col] = j;
      s.sign_of[col] = sgn;
      ++col;
    }
  }
  for (int r = 0; r < n_ineq; ++r) {
    s.T(r, n_split + r) = 1.0;
    s.rhs[r] = prob.ineq_b[r];
  }
  for (int r = 0; r < n_eq; ++r) s.rhs[n_ineq + r] = prob.eq_b[r];

  for (int r = 0; r < s.n_rows; ++r) {
    if (s.rhs[r] < 0.0) {
      s.T.row(r) = -s.T.row(r);
      s.rhs[r] = -s.rhs[r];
      s.row_sign[r] = -1.0;
    }
  }
  return s;
}

// Full-tableau simplex loop on `tab` (last column is the rhs) with objective
// row `obj` holding z_j - c_j. Bland's rule; `blocked` columns never enter.
// Returns false when a genuinely unbounded direction is found. Columns whose
// pivot candidates are all below kTinyPivot while the reduced cost is only
// noise-negative are retired instead of being declared unbounded; this is
// the regime of near-colinear constraint sets (dense point clouds on smooth
// curves) where a literal ratio test misfires.
bool simplex_iterate(Eigen::MatrixXd& tab, Eigen::RowVectorXd& obj,
                     std::vector<int>& basis, const std::vector<bool>& blocked,
                     int& pivots) {
  const int n_rows = static_cast<int>(tab.rows());
  const int n_cols = static_cast<int>(tab.cols()) - 1;
  std::vector<bool> retired(n_cols, false);

  while (true) {
    int entering = -1;
    for (int j = 0; j < n_cols; ++j) {
      if (!blocked[j] && !retired[j] && obj[j] < -kReducedCostTol) {
        entering = j;
        break;  // smallest improving index
      }
    }
    if (entering < 0) return true;

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int r = 0; r < n_rows; ++r) {
      const double coef = tab(r, entering);
      if (coef > kPivotTol) {
        const double ratio = tab(r, n_cols) / coef;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && leaving >= 0 &&
             basis[r] < basis[leaving])) {
          best_ratio = ratio;
          leaving = r;
        }
      }
    }
    if (leaving < 0) {
      // No comfortable pivot. Rerun the ratio test at the hard floor so
      // feasibility is preserved; only a column with real improvement and no
      // usable coefficient at all certifies unboundedness.
      for (int r = 0; r < n_rows; ++r) {
        const double coef = tab(r, entering);
        if (coef > kTinyPivot) {
          const double ratio = tab(r, n_cols) / coef;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && leaving >= 0 &&
               basis[r] < basis[leaving])) {
            best_ratio = ratio;
            leaving = r;
          }
        }
      }
      if (leaving < 0) {
        if (obj[entering] < -kStrongImprove) return false;  // unbounded
        retired[entering] = true;  // noise-level improvement, give up on it
        continue;
      }
    }

    if (++pivots > kMaxPivots) {
      throw std::runtime_error("lp_solve: pivot limit exceeded");
    }

    const double pivot = tab(leaving, entering);
    tab.row(leaving) /= pivot;
    for (int r = 0; r < n_rows; ++r) {
      if (r != leaving && std::abs(tab(r, entering)) > 0.0) {
        tab.row(r) -= tab(r, entering) * tab.row(leaving);
      }
    }
    obj -= obj[entering] * tab.row(leaving);
    basis[leaving] = entering;
  }
}

}  // namespace

LpSolution lp_solve(const LinearProgram& prob) {
  const Standardized s = standardize(prob);
  const int n_rows = s.n_rows;
  const int n_std = s.n_std;
  const int n_total = n_std + n_rows;  // artificial per row
  const int n_vars = static_cast<int>(prob.objective.size());

  LpSolution sol;

  if (n_rows == 0) {
    // No constraints: optimum is 0 iff no sign-compatible improving direction.
    sol.x = Eigen::VectorXd::Zero(n_vars);
    bool unbounded = false;
    for (int j = 0; j < n_vars; ++j) {
      const bool nn = prob.nonneg.empty() || prob.nonneg[j];
      if ((prob.objective[j] > kReducedCostTol) ||
          (!nn && prob.objective[j] < -kReducedCostTol)) {
        unbounded = true;
      }
    }
    sol.status = unbounded ? LpStatus::Unbounded : LpStatus::Optimal;
    sol.value = 0.0;
    return sol;
  }

  // Tableau with artificial identity block and rhs as the last column.
  Eigen::MatrixXd tab(n_rows, n_total + 1);
  tab.leftCols(n_std) = s.T;
  tab.middleCols(n_std, n_rows) = Eigen::MatrixXd::Identity(n_rows, n_rows);
  tab.col(n_total) = s.rhs;

  std::vector<int> basis(n_rows);
  for (int r = 0; r < n_rows; ++r) basis[r] = n_std + r;

  // Phase 1: maximize -sum(artificials); z_j - c_j with c = -1 on artificials.
  Eigen::RowVectorXd obj = Eigen::RowVectorXd::Zero(n_total + 1);
  for (int j = 0; j < n_total; ++j) {
    double z = 0.0;
    for (int r = 0; r < n_rows; ++r) z -= tab(r, j);
    obj[j] = z - (j >= n_std ? -1.0 : 0.0);
  }
  for (int r = 0; r < n_rows; ++r) obj[n_total] -= tab(r, n_total);

  std::vector<bool> blocked(n_total, false);
  if (!simplex_iterate(tab, obj, basis, blocked, sol.pivots)) {
    throw std::runtime_error("lp_solve: phase 1 reported unbounded");
  }
  double infeasibility = 0.0;
  for (int r = 0; r < n_rows; ++r) {
    if (basis[r] >= n_std) infeasibility += tab(r, n_total);
  }
  if (infeasibility > kPhase1Tol) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }

  // Pivot leftover artificials out where a usable column exists; rows that
  // offer none are redundant and keep a zero-valued artificial basic.
  for (int r = 0; r < n_rows; ++r) {
    if (basis[r] < n_std) continue;
    int target = -1;
    for (int j = 0; j < n_std; ++j) {
      if (std::abs(tab(r, j)) > kPivotTol) {
        target = j;
        break;
      }
    }
    if (target < 0) continue;
    const double pivot = tab(r, target);
    tab.row(r) /= pivot;
    for (int rr = 0; rr < n_rows; ++rr) {
      if (rr != r && std::abs(tab(rr, target)) > 0.0) {
        tab.row(rr) -= tab(rr, target) * tab.row(r);
      }
    }
    basis[r] = target;
  }

  // Phase 2 objective over the current basis; artificials may not re-enter.
  for (int j = 0; j <= n_total; ++j) {
    double z = 0.0;
    for (int r = 0; r < n_rows; ++r) {
      const int b = basis[r];
      const double cb = b < n_std ? s.cost[b] : 0.0;
      z += cb * tab(r, j);
    }
    obj[j] = z - (j < n_std ? s.cost[j] : 0.0);
  }
  obj[n_total] = 0.0;
  for (int r = 0; r < n_rows; ++r) {
    const int b = basis[r];
    if (b < n_std) obj[n_total] += s.cost[b] * tab(r, n_total);
  }
  for (int j = n_std; j < n_total; ++j) blocked[j] = true;

  if (!simplex_iterate(tab, obj, basis, blocked, sol.pivots)) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  // Re-solve the basic system against the original data for clean residuals.
  // A (near-)singular final basis can only arise from the sub-tolerance
  // pivot fallback; the tableau state is kept in that case.
  Eigen::MatrixXd B(n_rows, n_rows);
  Eigen::VectorXd cb(n_rows);
  for (int r = 0; r < n_rows; ++r) {
    const int b = basis[r];
    if (b < n_std) {
      B.col(r) = s.T.col(b);
      cb[r] = s.cost[b];
    } else {
      B.col(r) = Eigen::VectorXd::Unit(n_rows, b - n_std);
      cb[r] = 0.0;
    }
  }
  Eigen::VectorXd xb(n_rows), y(n_rows);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  if (lu.isInvertible()) {
    xb = lu.solve(s.rhs);
    y = lu.transpose().solve(cb);
  } else {
    for (int r = 0; r < n_rows; ++r) xb[r] = tab(r, n_total);
    for (int r = 0; r < n_rows; ++r) y[r] = obj[n_std + r];  // artificial rc = y_r
  }

  Eigen::VectorXd x_std = Eigen::VectorXd::Zero(n_std);
  for (int r = 0; r < n_rows; ++r) {
    if (basis[r] < n_std) x_std[basis[r]] = std::max(xb[r], 0.0);
  }

  sol.x = Eigen::VectorXd::Zero(n_vars);
  for (int j = 0; j < n_std; ++j) {
    if (s.var_of[j] >= 0) sol.x[s.var_of[j]] += s.sign_of[j] * x_std[j];
  }
  sol.value = prob.objective.dot(sol.x);

  // Duals in the original row orientation.
  sol.ineq_duals.resize(s.n_ineq);
  sol.eq_duals.resize(n_rows - s.n_ineq);
  for (int r = 0; r < s.n_ineq; ++r) sol.ineq_duals[r] = s.row_sign[r] * y[r];
  for (int r = s.n_ineq; r < n_rows; ++r) {
    sol.eq_duals[r - s.n_ineq] = s.row_sign[r] * y[r];
  }

  double comp = 0.0;
  if (s.n_ineq > 0) {
    const Eigen::VectorXd slack = prob.ineq_b - prob.ineq_A * sol.x;
    for (int r = 0; r < s.n_ineq; ++r) {
      comp = std::max(comp, std::abs(sol.ineq_duals[r] * slack[r]));
    }
  }
  for (int j = 0; j < n_std; ++j) {
    double rc = -s.cost[j];
    for (int r = 0; r < n_rows; ++r) rc += y[r] * s.T(r, j);
    comp = std::max(comp, std::abs(rc * x_std[j]));
  }
  sol.complementarity_residual = comp;
  sol.status = LpStatus::Optimal;
  return sol;
}

OtSolution exact_ot(const Eigen::MatrixXd& C, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  if (C.rows() != n || C.cols() != m) {
    throw std::invalid_argument("exact_ot: shape mismatch");
  }

  LinearProgram lp;
  lp.objective.resize(n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) lp.objective[i * m + j] = C(i, j);

  lp.eq_A = Eigen::MatrixXd::Zero(n + m, n * m);
  lp.eq_b.resize(n + m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) lp.eq_A(i, i * m + j) = 1.0;
    lp.eq_b[i] = a[i];
  }
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < n; ++i) lp.eq_A(n + j, i * m + j) = 1.0;
    lp.eq_b[n + j] = b[j];
  }

  const LpSolution sol = lp_solve(lp);
  if (sol.status != LpStatus::Optimal) {
    throw std::runtime_error("exact_ot: transport LP not optimal");
  }

  OtSolution ot;
  ot.value = sol.value;
  ot.plan.resize(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) ot.plan(i, j) = sol.x[i * m + j];
  ot.row_duals = sol.eq_duals.head(n);
  ot.col_duals = sol.eq_duals.tail(m);
  return ot;
}

namespace {

void check_psi_inputs(const Eigen::VectorXd& phi, const Eigen::MatrixXd& worker_points,
                      const Eigen::VectorXd& z) {
  if (phi.size() != worker_points.rows()) {
    throw std::invalid_argument("psi: phi/worker count mismatch");
  }
  if (z.size() != worker_points.cols()) {
    throw std::invalid_argument("psi: z dimension mismatch");
  }
  if (phi.minCoeff() < 0.0) {
    throw std::invalid_argument("psi: phi must be nonnegative");
  }
}

}  // namespace

PsiEvaluation psi_barycentric(const Eigen::VectorXd& phi,
                              const Eigen::MatrixXd& worker_points,
                              const Eigen::VectorXd& z) {
  check_psi_inputs(phi, worker_points, z);
  const int m = static_cast<int>(worker_points.rows());
  const int q = static_cast<int>(worker_points.cols());

  LinearProgram lp;
  lp.objective.resize(q + 1);
  lp.objective.head(q) = z;
  lp.objective[q] = 1.0;
  lp.ineq_A.resize(m, q + 1);
  lp.ineq_A.leftCols(q) = worker_points;
  lp.ineq_A.col(q).setOnes();
  lp.ineq_b = phi;
  lp.nonneg.assign(q + 1, false);

  const LpSolution sol = lp_solve(lp);
  PsiEvaluation ev;
  if (sol.status == LpStatus::Unbounded) {
    ev.status = PsiStatus::Infeasible;  // z outside conv(worker_points)
    return ev;
  }
  if (sol.status != LpStatus::Optimal) {
    throw std::runtime_error("psi_barycentric: unexpected LP status");
  }
  ev.status = PsiStatus::Optimal;
  ev.value = sol.value;
  ev.lambda = sol.x.head(q);
  ev.mu = sol.x[q];
  return ev;
}

PsiEvaluation psi_conical(const Eigen::VectorXd& phi,
                          const Eigen::MatrixXd& worker_points,
                          const Eigen::VectorXd& z) {
  check_psi_inputs(phi, worker_points, z);
  const int m = static_cast<int>(worker_points.rows());
  const int q = static_cast<int>(worker_points.cols());

  LinearProgram lp;
  lp.objective = z;
  lp.ineq_A = worker_points;
  lp.ineq_b = phi;
  lp.nonneg.assign(q, false);
  (void)m;

  const LpSolution sol = lp_solve(lp);
  PsiEvaluation ev;
  if (sol.status == LpStatus::Unbounded) {
    ev.status = PsiStatus::Infeasible;  // z outside cone(worker_points)
    return ev;
  }
  if (sol.status != LpStatus::Optimal) {
    throw std::runtime_error("psi_conical: unexpected LP status");
  }
  ev.status = PsiStatus::Optimal;
  ev.value = sol.value;
  ev.lambda = sol.x;
  return ev;
}

}  // namespace wotkit
