#include "wotkit/dual.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wotkit/bregman.hpp"
#include "wotkit/kernels.hpp"
#include "wotkit/primal.hpp"

namespace wotkit {

WageFunction::WageFunction(Eigen::VectorXd phi, Eigen::MatrixXd worker_points,
                           PsiMode mode)
    : phi_(std::move(phi)), mode_(mode), worker_points_(std::move(worker_points)) {
  if (phi_.size() != worker_points_.rows()) {
    throw std::invalid_argument("WageFunction: phi/worker count mismatch");
  }
  if (phi_.minCoeff() < 0.0) {
    throw std::invalid_argument("WageFunction: phi must be nonnegative");
  }
  const int m = static_cast<int>(phi_.size());
  psi_values_.resize(m);
  kernels::parallel_for(m, [&](int j) {
    const PsiEvaluation ev = psi(worker_points_.row(j).transpose());
    if (ev.status != PsiStatus::Optimal) {
      // A worker type is trivially representable by its own one-hot p.
      throw std::runtime_error("WageFunction: psi infeasible at a worker type");
    }
    psi_values_[j] = ev.value;
  });
}

PsiEvaluation WageFunction::psi(const Eigen::VectorXd& z) const {
  return mode_ == PsiMode::Barycentric ? psi_barycentric(phi_, worker_points_, z)
                                       : psi_conical(phi_, worker_points_, z);
}

WageFunction recover_psi(const Eigen::VectorXd& phi, const Eigen::MatrixXd& worker_points,
                         PsiMode mode) {
  return WageFunction(phi, worker_points, mode);
}

double h_value(const Eigen::VectorXd& phi, const Eigen::MatrixXd& P,
               const Eigen::VectorXd& a, const CostModel& cost) {
  if (phi.size() != P.cols()) {
    throw std::invalid_argument("h_value: phi/plan shape mismatch");
  }
  return objective_f(P, a, cost) - (P * phi).sum();
}

Eigen::MatrixXd h_gradient_P(const Eigen::VectorXd& phi, const Eigen::MatrixXd& P,
                             const Eigen::VectorXd& a, const CostModel& cost) {
  if (phi.size() != P.cols()) {
    throw std::invalid_argument("h_gradient_P: phi/plan shape mismatch");
  }
  Eigen::MatrixXd G = objective_gradient(P, a, cost);
  G.rowwise() -= phi.transpose();
  return G;
}

namespace {

struct InnerResult {
  Eigen::MatrixXd P;
  double h_best = -std::numeric_limits<double>::infinity();
  bool diverged = false;
};

// Mirror ascent on P at fixed phi. WOT keeps P row-feasible (P1 = a) by the
// closed-form row reweighting; WOTUK is unconstrained on the cone. The h
// ceiling catches unbounded inner problems (possible for WOTUK when phi is
// too small to price some ray).
InnerResult inner_ascent(const Eigen::VectorXd& phi, Eigen::MatrixXd P,
                         const Eigen::VectorXd& a, const CostModel& cost,
                         ProblemKind problem, double gamma1, int iters,
                         double h_ceiling, bool track_best) {
  InnerResult res;
  for (int k = 0; k < iters; ++k) {
    const Eigen::MatrixXd G = h_gradient_P(phi, P, a, cost);
    P = mirror_step(P, G, gamma1);
    if (problem == ProblemKind::Wot) {
      P = kl_project_first_marginal(P, a);
    }
    if (track_best || problem == ProblemKind::Wotuk) {
      const double h = h_value(phi, P, a, cost);
      if (h > res.h_best) res.h_best = h;
      if (h > h_ceiling) {
        res.diverged = true;
        break;
      }
    }
  }
  res.P = std::move(P);
  return res;
}

}  // namespace

DualReport solve_dual(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                      const Eigen::MatrixXd& worker_points, const CostModel& cost,
                      ProblemKind problem, const DualConfig& config) {
  if (a.size() != cost.firm_count() || b.size() != cost.worker_count()) {
    throw std::invalid_argument("solve_dual: measure/cost shape mismatch");
  }
  if (worker_points.rows() != b.size()) {
    throw std::invalid_argument("solve_dual: worker point count mismatch");
  }
  if (!(config.gamma1 > 0.0) || !(config.gamma2 > 0.0) || config.k1 < 1 ||
      config.k2 < 1) {
    throw std::invalid_argument("solve_dual: stepsizes and counts must be positive");
  }
  if (problem == ProblemKind::Wot && cost.domain() != CostDomain::SimplexScaled) {
    throw std::invalid_argument("solve_dual: WOT needs a simplex-scaled cost");
  }
  if (problem == ProblemKind::Wotuk && cost.domain() != CostDomain::Cone) {
    throw std::invalid_argument("solve_dual: WOTUK needs a cone-domain cost");
  }

  const int m = static_cast<int>(b.size());
  Eigen::VectorXd phi = Eigen::VectorXd::Ones(m);
  if (config.phi_init == PhiInit::WarmStart) {
    // Per-column marginal productivity of a primal solve: plan-weighted
    // column means of the gradient.
    PrimalConfig pc;
    pc.keep_trace = false;
    pc.gap_method = static_cast<Eigen::Index>(a.size()) * b.size() > 4096
                        ? GapMethod::EntropicBound
                        : GapMethod::ExactLp;
    const SolveReport warm = solve_primal(a, b, cost, problem, pc);
    const Eigen::MatrixXd G = objective_gradient(warm.plan.matrix, a, cost);
    const Eigen::VectorXd mass = col_sums(warm.plan.matrix);
    for (int j = 0; j < m; ++j) {
      const double wsum = warm.plan.matrix.col(j).dot(G.col(j));
      phi[j] = mass[j] > 0.0 ? std::max(wsum / mass[j], 0.0) : 1.0;
    }
  }

  Eigen::MatrixXd P = a * b.transpose();
  Eigen::VectorXd phi_sum = Eigen::VectorXd::Zero(m);
  int divergence_events = 0;
  int outer_done = 0;
  double outer_resid = std::numeric_limits<double>::infinity();

  for (int k1 = 0; k1 < config.k1; ++k1) {
    InnerResult inner = inner_ascent(phi, std::move(P), a, cost, problem,
                                     config.gamma1, config.k2, config.h_ceiling,
                                     /*track_best=*/false);
    if (inner.diverged) ++divergence_events;
    P = std::move(inner.P);

    // Envelope-theorem gradient at the current inner iterate. The clamped
    // exponential keeps phi finite when a diverged inner run leaves huge
    // column sums behind.
    const Eigen::VectorXd grad_phi = b - col_sums(P);
    Eigen::MatrixXd phi_next;
    kernels::scaled_exp(phi, -grad_phi, config.gamma2, phi_next);
    phi = phi_next;
    phi_sum += phi;
    ++outer_done;

    outer_resid = grad_phi.lpNorm<Eigen::Infinity>();
    if (config.outer_stop && outer_resid <= config.outer_stop_tol) break;
  }

  // Certify the inner maximum from a fresh start so the reported dual
  // objective is not a stale iterate value. Constant-step mirror descent
  // settles into a limit cycle around the optimum, so the running average of
  // the outer iterates is certified as well and the better wage vector wins.
  auto certify = [&](const Eigen::VectorXd& wages) {
    InnerResult cert =
        inner_ascent(wages, a * b.transpose(), a, cost, problem, config.gamma1,
                     config.k2_final, config.h_ceiling, /*track_best=*/true);
    if (cert.diverged) ++divergence_events;
    return std::pair<double, InnerResult>(b.dot(wages) + cert.h_best,
                                          std::move(cert));
  };
  auto [g_last, cert_last] = certify(phi);
  const Eigen::VectorXd phi_avg = phi_sum / static_cast<double>(outer_done);
  auto [g_avg, cert_avg] = certify(phi_avg);

  const bool use_avg = g_avg < g_last;
  const Eigen::VectorXd& phi_sel = use_avg ? phi_avg : phi;
  InnerResult& cert = use_avg ? cert_avg : cert_last;

  const PsiMode mode =
      problem == ProblemKind::Wot ? PsiMode::Barycentric : PsiMode::Conical;
  DualReport report{recover_psi(phi_sel, worker_points, mode),
                    use_avg ? g_avg : g_last,
                    std::move(cert.P),
                    cert.h_best,
                    outer_resid,
                    outer_done,
                    divergence_events,
                    use_avg};
  return report;
}

DualReport solve_dual(const DiscreteMeasure& firms, const DiscreteMeasure& workers,
                      const CostModel& cost, ProblemKind problem,
                      const DualConfig& config) {
  return solve_dual(firms.weights(), workers.weights(), workers.points(), cost, problem,
                    config);
}

}  // namespace wotkit
