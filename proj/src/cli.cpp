#include "wotkit/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wotkit/labor_market.hpp"
#include "wotkit/simplex.hpp"
#include "wotkit/version.hpp"

namespace wotkit::cli {

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown config key '" + it.key() + "' in " + where);
    }
  }
}

template <typename T>
void get_if(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void apply_config_json(const json& j, RunConfig& cfg) {
  check_keys(j,
             {"problem", "cost", "solver", "firms", "workers", "cost_matrix",
              "out_dir", "seed", "ces", "eot", "primal", "dual"},
             "top level");
  get_if(j, "problem", cfg.problem);
  get_if(j, "cost", cfg.cost);
  get_if(j, "solver", cfg.solver);
  get_if(j, "firms", cfg.firms);
  get_if(j, "workers", cfg.workers);
  get_if(j, "cost_matrix", cfg.cost_matrix);
  get_if(j, "out_dir", cfg.out_dir);
  get_if(j, "seed", cfg.seed);

  if (j.contains("ces")) {
    const json& c = j.at("ces");
    check_keys(c, {"zeta", "sigma"}, "ces");
    double zeta = cfg.ces.zeta, sigma = cfg.ces.sigma;
    get_if(c, "zeta", zeta);
    get_if(c, "sigma", sigma);
    cfg.ces = CesParams(zeta, sigma);
  }
  if (j.contains("eot")) {
    const json& e = j.at("eot");
    check_keys(e, {"epsilon", "max_iters", "marginal_tol", "log_domain"}, "eot");
    get_if(e, "epsilon", cfg.eot.epsilon);
    get_if(e, "max_iters", cfg.eot.max_iters);
    get_if(e, "marginal_tol", cfg.eot.marginal_tol);
    get_if(e, "log_domain", cfg.eot.log_domain);
  }
  if (j.contains("primal")) {
    const json& p = j.at("primal");
    check_keys(p,
               {"gamma", "tolerance", "max_iters", "gap_check_every", "gap_method",
                "adaptive_gamma", "entropic_gap_epsilon", "sinkhorn_tol",
                "sinkhorn_max_iters", "keep_trace"},
               "primal");
    get_if(p, "gamma", cfg.primal.gamma);
    get_if(p, "tolerance", cfg.primal.tolerance);
    get_if(p, "max_iters", cfg.primal.max_iters);
    get_if(p, "gap_check_every", cfg.primal.gap_check_every);
    if (p.contains("gap_method")) {
      cfg.primal.gap_method = gap_method_from_name(p.at("gap_method").get<std::string>());
    }
    get_if(p, "adaptive_gamma", cfg.primal.adaptive_gamma);
    get_if(p, "entropic_gap_epsilon", cfg.primal.entropic_gap_epsilon);
    get_if(p, "sinkhorn_tol", cfg.primal.sinkhorn_tol);
    get_if(p, "sinkhorn_max_iters", cfg.primal.sinkhorn_max_iters);
    get_if(p, "keep_trace", cfg.primal.keep_trace);
  }
  if (j.contains("dual")) {
    const json& d = j.at("dual");
    check_keys(d,
               {"gamma1", "gamma2", "k1", "k2", "phi_init", "k2_final", "h_ceiling",
                "outer_stop", "outer_stop_tol"},
               "dual");
    get_if(d, "gamma1", cfg.dual.gamma1);
    get_if(d, "gamma2", cfg.dual.gamma2);
    get_if(d, "k1", cfg.dual.k1);
    get_if(d, "k2", cfg.dual.k2);
    if (d.contains("phi_init")) {
      const std::string v = d.at("phi_init").get<std::string>();
      if (v == "ones") {
        cfg.dual.phi_init = PhiInit::Ones;
      } else if (v == "warm-start") {
        cfg.dual.phi_init = PhiInit::WarmStart;
      } else {
        throw ConfigError("dual.phi_init must be 'ones' or 'warm-start'");
      }
    }
    get_if(d, "k2_final", cfg.dual.k2_final);
    get_if(d, "h_ceiling", cfg.dual.h_ceiling);
    get_if(d, "outer_stop", cfg.dual.outer_stop);
    get_if(d, "outer_stop_tol", cfg.dual.outer_stop_tol);
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  RunConfig cfg;
  apply_config_json(j, cfg);
  return cfg;
}

json config_json(const RunConfig& cfg) {
  json j;
  j["problem"] = cfg.problem;
  j["cost"] = cfg.cost;
  j["solver"] = cfg.solver;
  j["firms"] = cfg.firms;
  j["workers"] = cfg.workers;
  j["cost_matrix"] = cfg.cost_matrix;
  j["out_dir"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  j["ces"] = {{"zeta", cfg.ces.zeta}, {"sigma", cfg.ces.sigma}};
  j["eot"] = {{"epsilon", cfg.eot.epsilon},
              {"max_iters", cfg.eot.max_iters},
              {"marginal_tol", cfg.eot.marginal_tol},
              {"log_domain", cfg.eot.log_domain}};
  j["primal"] = {{"gamma", cfg.primal.gamma},
                 {"tolerance", cfg.primal.tolerance},
                 {"max_iters", cfg.primal.max_iters},
                 {"gap_check_every", cfg.primal.gap_check_every},
                 {"gap_method", gap_method_name(cfg.primal.gap_method)},
                 {"adaptive_gamma", cfg.primal.adaptive_gamma},
                 {"entropic_gap_epsilon", cfg.primal.entropic_gap_epsilon},
                 {"sinkhorn_tol", cfg.primal.sinkhorn_tol},
                 {"sinkhorn_max_iters", cfg.primal.sinkhorn_max_iters},
                 {"keep_trace", cfg.primal.keep_trace}};
  j["dual"] = {{"gamma1", cfg.dual.gamma1},
               {"gamma2", cfg.dual.gamma2},
               {"k1", cfg.dual.k1},
               {"k2", cfg.dual.k2},
               {"phi_init", cfg.dual.phi_init == PhiInit::Ones ? "ones" : "warm-start"},
               {"k2_final", cfg.dual.k2_final},
               {"h_ceiling", cfg.dual.h_ceiling},
               {"outer_stop", cfg.dual.outer_stop},
               {"outer_stop_tol", cfg.dual.outer_stop_tol}};
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "iter,objective,ugap\n";
  for (const TracePoint& t : trace) {
    out << t.iter << ',' << format_double(t.objective) << ','
        << format_double(t.ugap) << '\n';
  }
}

void write_wages_csv(const std::string& path, const WageFunction& wages) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "worker_index,phi,psi\n";
  for (Eigen::Index j = 0; j < wages.phi().size(); ++j) {
    out << j << ',' << format_double(wages.phi()[j]) << ','
        << format_double(wages.psi_values()[j]) << '\n';
  }
}

Eigen::VectorXd read_phi_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open wages file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw ConfigError(path + ": empty wages file");
  // locate the phi column
  int phi_col = -1, col = 0;
  {
    std::stringstream ss(header);
    std::string field;
    while (std::getline(ss, field, ',')) {
      if (field == "phi") phi_col = col;
      ++col;
    }
  }
  if (phi_col < 0) throw ConfigError(path + ": no 'phi' column");
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    int c = 0;
    while (std::getline(ss, field, ',')) {
      if (c == phi_col) vals.push_back(std::strtod(field.c_str(), nullptr));
      ++c;
    }
  }
  Eigen::VectorXd phi(static_cast<Eigen::Index>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) phi[static_cast<Eigen::Index>(i)] = vals[i];
  return phi;
}

struct LoadedProblem {
  DiscreteMeasure firms;
  DiscreteMeasure workers;
  std::unique_ptr<CostModel> cost;   // null for ot/eot
  Eigen::MatrixXd pointwise;         // linear / pointwise CES matrix for ot/eot
};

void validate_compat(const RunConfig& cfg) {
  const std::set<std::string> problems{"ot", "eot", "wot", "wotuk"};
  const std::set<std::string> costs{"linear", "ces-barycentric", "ces-conical"};
  const std::set<std::string> solvers{"primal", "dual"};
  if (!problems.count(cfg.problem)) throw ConfigError("unknown problem: " + cfg.problem);
  if (!costs.count(cfg.cost)) throw ConfigError("unknown cost: " + cfg.cost);
  if (!solvers.count(cfg.solver)) throw ConfigError("unknown solver: " + cfg.solver);
  if (cfg.cost == "ces-conical" && cfg.problem != "wotuk") {
    throw ConfigError("ces-conical pairs with problem wotuk only");
  }
  if (cfg.problem == "wotuk" && cfg.cost != "ces-conical") {
    throw ConfigError("problem wotuk needs the ces-conical cost");
  }
  if ((cfg.problem == "ot" || cfg.problem == "eot") && cfg.solver == "dual") {
    throw ConfigError("solver dual applies to wot/wotuk only");
  }
  if (cfg.firms.empty() || cfg.workers.empty()) {
    throw ConfigError("firms and workers CSV paths are required");
  }
  if (cfg.cost == "linear" && cfg.cost_matrix.empty()) {
    throw ConfigError("linear cost needs cost_matrix");
  }
}

LoadedProblem load_problem(const RunConfig& cfg) {
  DiscreteMeasure firms = read_measure_csv(cfg.firms);
  DiscreteMeasure workers = read_measure_csv(cfg.workers);

  LoadedProblem lp{std::move(firms), std::move(workers), nullptr, {}};
  const bool baseline = cfg.problem == "ot" || cfg.problem == "eot";

  if (cfg.cost == "linear") {
    lp.pointwise = read_plan_csv(cfg.cost_matrix);
    if (lp.pointwise.rows() != lp.firms.size() ||
        lp.pointwise.cols() != lp.workers.size()) {
      throw ConfigError("cost_matrix shape does not match the measures");
    }
    if (!baseline) lp.cost = linear_cost(lp.pointwise);
  } else {
    const CostDomain dom =
        cfg.cost == "ces-conical" ? CostDomain::Cone : CostDomain::SimplexScaled;
    if (baseline) {
      lp.pointwise = ces_pointwise_matrix(lp.firms.points(), lp.workers.points(), cfg.ces);
    } else {
      lp.cost = ces_cost(lp.firms.points(), lp.workers.points(), cfg.ces, dom);
    }
  }
  return lp;
}

json base_report(const RunConfig& cfg, const std::string& command) {
  json j;
  j["tool"] = "wotkit";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = config_json(cfg);
  return j;
}

void finish_report(json& j, const std::string& out_dir, double wall_seconds) {
  j["wall_time_seconds"] = wall_seconds;
  write_json_file(out_dir + "/report.json", j);
}

int do_solve(const RunConfig& cfg) {
  validate_compat(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  LoadedProblem lp = load_problem(cfg);
  std::filesystem::create_directories(cfg.out_dir);

  json report = base_report(cfg, "solve");
  report["problem"] = cfg.problem;
  int code = kExitOk;

  if (cfg.problem == "ot") {
    const OtSolution ot = exact_ot(lp.pointwise, lp.firms.weights(), lp.workers.weights());
    write_plan_csv(cfg.out_dir + "/plan.csv", ot.plan);
    write_trace_csv(cfg.out_dir + "/trace.csv", {});
    const FeasibilityResiduals r = feasibility_residuals(
        ot.plan, lp.firms.weights(), lp.workers.weights(), ProblemKind::Wot);
    report["objective"] = ot.value;
    report["certified_gap_upper"] = 0.0;
    report["converged"] = true;
    report["iterations"] = 0;
    report["row_residual_inf"] = r.row_inf;
    report["col_residual_inf"] = r.col_inf;
  } else if (cfg.problem == "eot") {
    const SinkhornResult sk =
        sinkhorn_eot(lp.pointwise, lp.firms.weights(), lp.workers.weights(), cfg.eot);
    write_plan_csv(cfg.out_dir + "/plan.csv", sk.plan);
    write_trace_csv(cfg.out_dir + "/trace.csv", {});
    const FeasibilityResiduals r = feasibility_residuals(
        sk.plan, lp.firms.weights(), lp.workers.weights(), ProblemKind::Wot);
    report["objective"] = (lp.pointwise.array() * sk.plan.array()).sum();
    report["epsilon"] = cfg.eot.epsilon;
    report["converged"] = sk.converged;
    report["iterations"] = sk.iterations;
    report["marginal_error"] = sk.marginal_error;
    report["log_domain"] = sk.used_log_domain;
    report["row_residual_inf"] = r.row_inf;
    report["col_residual_inf"] = r.col_inf;
    if (!sk.converged) code = kExitNoConverge;
  } else {
    const ProblemKind kind = problem_from_name(cfg.problem);
    if (cfg.solver == "primal") {
      const SolveReport sr = solve_primal(lp.firms, lp.workers, *lp.cost, kind, cfg.primal);
      write_plan_csv(cfg.out_dir + "/plan.csv", sr.plan.matrix);
      write_trace_csv(cfg.out_dir + "/trace.csv", sr.trace);
      report["objective"] = sr.objective;
      report["certified_gap_upper"] = sr.certified_gap_upper;
      report["converged"] = sr.converged;
      report["iterations"] = sr.iterations;
      report["row_residual_inf"] = sr.row_residual_inf;
      report["col_residual_inf"] = sr.col_residual_inf;
      report["gradient_mode"] = sr.gradient_mode;
      report["gamma_final"] = sr.gamma_final;
      report["saturated"] = sr.saturated;
      report["absolute_gap_mode"] = sr.absolute_gap_mode;
      report["projection_failures"] = sr.projection_failures;
      report["gap_method"] = gap_method_name(sr.gap_method);
      if (!sr.converged) code = kExitNoConverge;
    } else {
      const DualReport dr = solve_dual(lp.firms, lp.workers, *lp.cost, kind, cfg.dual);
      write_plan_csv(cfg.out_dir + "/plan.csv", dr.inner_plan);
      write_trace_csv(cfg.out_dir + "/trace.csv", {});
      write_wages_csv(cfg.out_dir + "/wages.csv", dr.wages);
      report["dual_objective"] = dr.dual_objective;
      report["inner_h"] = dr.inner_h;
      report["outer_residual_inf"] = dr.outer_residual_inf;
      report["outer_iterations"] = dr.outer_iterations;
      report["divergence_events"] = dr.divergence_events;
    }
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  finish_report(report, cfg.out_dir, secs);
  return code;
}

json plan_stats(const Eigen::MatrixXd& P, double threshold = 1e-6) {
  json rows = json::array();
  int support = 0;
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    int row_support = 0;
    double entropy = 0.0;
    const double mass = P.row(i).sum();
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      if (P(i, j) > threshold) ++row_support;
      if (mass > 0 && P(i, j) > 0) {
        const double p = P(i, j) / mass;
        entropy -= p * std::log(p);
      }
    }
    support += row_support;
    rows.push_back({{"row", i}, {"support", row_support}, {"entropy", entropy}});
  }
  return json{{"support", support},
              {"max_entry", P.maxCoeff()},
              {"threshold", threshold},
              {"rows", rows}};
}

int do_compare(const RunConfig& base) {
  RunConfig cfg = base;
  if (cfg.firms.empty() || cfg.workers.empty()) {
    throw ConfigError("firms and workers CSV paths are required");
  }
  const auto t0 = std::chrono::steady_clock::now();
  const DiscreteMeasure firms = read_measure_csv(cfg.firms);
  const DiscreteMeasure workers = read_measure_csv(cfg.workers);
  std::filesystem::create_directories(cfg.out_dir);

  const Eigen::MatrixXd C = ces_pointwise_matrix(firms.points(), workers.points(), cfg.ces);
  const Eigen::VectorXd& a = firms.weights();
  const Eigen::VectorXd& b = workers.weights();

  json summary = base_report(cfg, "compare");
  bool all_ok = true;

  auto record = [&](const std::string& name, const Eigen::MatrixXd& plan,
                    double objective, bool converged) {
    write_plan_csv(cfg.out_dir + "/" + name + "_plan.csv", plan);
    json entry = plan_stats(plan);
    entry["objective"] = objective;
    entry["converged"] = converged;
    // WOTUK rows scale into the unnormalized kernel q_ij = P_ij / a_i.
    if (name == "wotuk") {
      entry["max_kernel_entry"] = (a.cwiseInverse().asDiagonal() * plan).maxCoeff();
    }
    summary["models"][name] = entry;
    if (!converged) all_ok = false;
  };

  try {
    const OtSolution ot = exact_ot(C, a, b);
    record("ot", ot.plan, ot.value, true);
  } catch (const std::exception& e) {
    summary["models"]["ot"] = {{"error", e.what()}};
    all_ok = false;
  }
  try {
    const SinkhornResult sk = sinkhorn_eot(C, a, b, cfg.eot);
    record("eot", sk.plan, (C.array() * sk.plan.array()).sum(), sk.converged);
  } catch (const std::exception& e) {
    summary["models"]["eot"] = {{"error", e.what()}};
    all_ok = false;
  }
  try {
    auto cost = ces_cost(firms.points(), workers.points(), cfg.ces,
                         CostDomain::SimplexScaled);
    const SolveReport sr = solve_primal(firms, workers, *cost, ProblemKind::Wot, cfg.primal);
    record("wot", sr.plan.matrix, sr.objective, sr.converged);
  } catch (const std::exception& e) {
    summary["models"]["wot"] = {{"error", e.what()}};
    all_ok = false;
  }
  try {
    auto cost = ces_cost(firms.points(), workers.points(), cfg.ces, CostDomain::Cone);
    const SolveReport sr =
        solve_primal(firms, workers, *cost, ProblemKind::Wotuk, cfg.primal);
    record("wotuk", sr.plan.matrix, sr.objective, sr.converged);
  } catch (const std::exception& e) {
    summary["models"]["wotuk"] = {{"error", e.what()}};
    all_ok = false;
  }

  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  summary["wall_time_seconds"] = secs;
  write_json_file(cfg.out_dir + "/summary.json", summary);
  return all_ok ? kExitOk : kExitNoConverge;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"wotkit: weak optimal transport solvers for worker-firm matching"};
  app.require_subcommand(1);

  // --- scenario -----------------------------------------------------------
  auto* sc = app.add_subcommand("scenario", "generate a worker-firm economy");
  sc->alias("make-scenario");
  std::string sc_kind = "A", sc_out = ".";
  int sc_n = 10, sc_m = 30;
  double sc_kappa = 2.0, sc_zmin = 1.0, sc_zmax = 1.0;
  sc->add_option("--kind", sc_kind, "A (many specialists) or B (many generalists)");
  sc->add_option("--n", sc_n, "number of firm types");
  sc->add_option("--m", sc_m, "number of worker types");
  sc->add_option("--kappa", sc_kappa, "weight sharpness");
  sc->add_option("--z-min", sc_zmin, "firm productivity range low end");
  sc->add_option("--z-max", sc_zmax, "firm productivity range high end");
  sc->add_option("--out-dir", sc_out, "output directory");

  // --- solve / solve-eot / solve-dual --------------------------------------
  std::string cfg_path;
  RunConfig flag_cfg;
  bool has_flag[16] = {};
  auto add_solve_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", cfg_path, "JSON config file");
    cmd->add_option("--problem", flag_cfg.problem)->each([&](const std::string&) {
      has_flag[0] = true;
    });
    cmd->add_option("--cost", flag_cfg.cost)->each([&](const std::string&) {
      has_flag[1] = true;
    });
    cmd->add_option("--solver", flag_cfg.solver)->each([&](const std::string&) {
      has_flag[2] = true;
    });
    cmd->add_option("--firms", flag_cfg.firms)->each([&](const std::string&) {
      has_flag[3] = true;
    });
    cmd->add_option("--workers", flag_cfg.workers)->each([&](const std::string&) {
      has_flag[4] = true;
    });
    cmd->add_option("--cost-matrix", flag_cfg.cost_matrix)->each([&](const std::string&) {
      has_flag[5] = true;
    });
    cmd->add_option("--out-dir", flag_cfg.out_dir)->each([&](const std::string&) {
      has_flag[6] = true;
    });
    cmd->add_option("--seed", flag_cfg.seed)->each([&](const std::string&) {
      has_flag[7] = true;
    });
    cmd->add_option("--epsilon", flag_cfg.eot.epsilon)->each([&](const std::string&) {
      has_flag[8] = true;
    });
    cmd->add_option("--gamma", flag_cfg.primal.gamma)->each([&](const std::string&) {
      has_flag[9] = true;
    });
    cmd->add_option("--tolerance", flag_cfg.primal.tolerance)
        ->each([&](const std::string&) { has_flag[10] = true; });
    cmd->add_option("--max-iters", flag_cfg.primal.max_iters)
        ->each([&](const std::string&) { has_flag[11] = true; });
  };

  auto* solve = app.add_subcommand("solve", "solve ot/eot/wot/wotuk and write artifacts");
  add_solve_flags(solve);
  auto* solve_eot = app.add_subcommand("solve-eot", "entropic OT baseline");
  add_solve_flags(solve_eot);
  auto* solve_dual =
      app.add_subcommand("solve-dual", "nested mirror descent on wages");
  add_solve_flags(solve_dual);

  // --- compare --------------------------------------------------------------
  auto* compare = app.add_subcommand("compare", "run OT/EOT/WOT/WOTUK on one economy");
  std::string cp_firms, cp_workers, cp_out = ".";
  double cp_epsilon = 0.1;
  compare->add_option("--firms", cp_firms)->required();
  compare->add_option("--workers", cp_workers)->required();
  compare->add_option("--out-dir", cp_out);
  compare->add_option("--epsilon", cp_epsilon, "EOT regularization");
  double cp_gamma = 0.1, cp_tol = 1e-3;
  int cp_iters = 10000;
  compare->add_option("--gamma", cp_gamma);
  compare->add_option("--tolerance", cp_tol);
  compare->add_option("--max-iters", cp_iters);

  // --- wages ----------------------------------------------------------------
  auto* wages = app.add_subcommand("wages", "recover psi from a phi CSV");
  std::string wg_workers, wg_phi, wg_mode = "barycentric", wg_out = "wages.csv";
  wages->add_option("--workers", wg_workers)->required();
  wages->add_option("--phi", wg_phi, "CSV with a 'phi' column")->required();
  wages->add_option("--mode", wg_mode, "barycentric | conical");
  wages->add_option("--out", wg_out);

  // --- psi-grid ---------------------------------------------------------------
  auto* psig = app.add_subcommand("psi-grid", "evaluate psi on a square grid");
  std::string pg_workers, pg_phi, pg_mode = "barycentric", pg_out = "psi_grid.csv";
  int pg_res = 64;
  double pg_radius = 1.0;
  psig->add_option("--workers", pg_workers)->required();
  psig->add_option("--phi", pg_phi, "CSV with a 'phi' column")->required();
  psig->add_option("--mode", pg_mode, "barycentric | conical");
  psig->add_option("--res", pg_res, "grid resolution per axis");
  psig->add_option("--radius", pg_radius, "grid extends over [0, radius]^2");
  psig->add_option("--out", pg_out);

  // --- metrics -----------------------------------------------------------------
  auto* metrics = app.add_subcommand("metrics", "economic metrics from a plan");
  std::string mt_plan, mt_firms, mt_workers, mt_out = ".";
  metrics->add_option("--plan", mt_plan)->required();
  metrics->add_option("--firms", mt_firms)->required();
  metrics->add_option("--workers", mt_workers)->required();
  metrics->add_option("--out-dir", mt_out);

  std::vector<const char*> argv;
  argv.push_back("wotkit");
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (app.got_subcommand(sc)) {
      const Scenario s = make_scenario(scenario_from_name(sc_kind), sc_n, sc_m,
                                       sc_kappa, sc_zmin, sc_zmax);
      std::filesystem::create_directories(sc_out);
      write_measure_csv(sc_out + "/firms.csv", s.firms, firm_coord_names());
      write_measure_csv(sc_out + "/workers.csv", s.workers, worker_coord_names());
      return kExitOk;
    }

    if (app.got_subcommand(solve) || app.got_subcommand(solve_eot) ||
        app.got_subcommand(solve_dual)) {
      RunConfig cfg = cfg_path.empty() ? RunConfig{} : load_config_file(cfg_path);
      if (has_flag[0]) cfg.problem = flag_cfg.problem;
      if (has_flag[1]) cfg.cost = flag_cfg.cost;
      if (has_flag[2]) cfg.solver = flag_cfg.solver;
      if (has_flag[3]) cfg.firms = flag_cfg.firms;
      if (has_flag[4]) cfg.workers = flag_cfg.workers;
      if (has_flag[5]) cfg.cost_matrix = flag_cfg.cost_matrix;
      if (has_flag[6]) cfg.out_dir = flag_cfg.out_dir;
      if (has_flag[7]) cfg.seed = flag_cfg.seed;
      if (has_flag[8]) cfg.eot.epsilon = flag_cfg.eot.epsilon;
      if (has_flag[9]) cfg.primal.gamma = flag_cfg.primal.gamma;
      if (has_flag[10]) cfg.primal.tolerance = flag_cfg.primal.tolerance;
      if (has_flag[11]) cfg.primal.max_iters = flag_cfg.primal.max_iters;
      if (app.got_subcommand(solve_eot)) cfg.problem = "eot";
      if (app.got_subcommand(solve_dual)) cfg.solver = "dual";
      return do_solve(cfg);
    }

    if (app.got_subcommand(compare)) {
      RunConfig cfg;
      cfg.firms = cp_firms;
      cfg.workers = cp_workers;
      cfg.out_dir = cp_out;
      cfg.eot.epsilon = cp_epsilon;
      cfg.primal.gamma = cp_gamma;
      cfg.primal.tolerance = cp_tol;
      cfg.primal.max_iters = cp_iters;
      return do_compare(cfg);
    }

    if (app.got_subcommand(wages)) {
      const DiscreteMeasure workers_m = read_measure_csv(wg_workers);
      const Eigen::VectorXd phi = read_phi_csv(wg_phi);
      if (phi.size() != workers_m.size()) {
        throw ConfigError("phi length does not match the worker measure");
      }
      const PsiMode mode =
          wg_mode == "conical" ? PsiMode::Conical : PsiMode::Barycentric;
      const WageFunction wf = recover_psi(phi, workers_m.points(), mode);
      write_wages_csv(wg_out, wf);
      return kExitOk;
    }

    if (app.got_subcommand(psig)) {
      const DiscreteMeasure workers_m = read_measure_csv(pg_workers);
      const Eigen::VectorXd phi = read_phi_csv(pg_phi);
      if (phi.size() != workers_m.size()) {
        throw ConfigError("phi length does not match the worker measure");
      }
      const PsiMode mode =
          pg_mode == "conical" ? PsiMode::Conical : PsiMode::Barycentric;
      const WageFunction wf = recover_psi(phi, workers_m.points(), mode);
      const PsiGrid grid = wage_surface(wf, pg_res, pg_radius);
      std::ofstream out(pg_out);
      if (!out) throw std::runtime_error("cannot write " + pg_out);
      out << "x1,x2,psi,feasible\n";
      for (Eigen::Index i = 0; i < grid.x1.size(); ++i) {
        for (Eigen::Index j = 0; j < grid.x2.size(); ++j) {
          out << format_double(grid.x1[i]) << ',' << format_double(grid.x2[j]) << ','
              << format_double(grid.feasible(i, j)
                                   ? grid.values(i, j)
                                   : std::numeric_limits<double>::quiet_NaN())
              << ',' << (grid.feasible(i, j) ? 1 : 0) << '\n';
        }
      }
      return kExitOk;
    }

    if (app.got_subcommand(metrics)) {
      const DiscreteMeasure firms_m = read_measure_csv(mt_firms);
      const DiscreteMeasure workers_m = read_measure_csv(mt_workers);
      const Eigen::MatrixXd plan = read_plan_csv(mt_plan);
      std::filesystem::create_directories(mt_out);

      const auto pairs = alpha_to_theta(plan, firms_m, workers_m);
      std::ofstream at(mt_out + "/alpha_theta.csv");
      if (!at) throw std::runtime_error("cannot write alpha_theta.csv");
      at << "alpha2,theta_bar\n";
      for (const auto& [alpha2, theta] : pairs) {
        at << format_double(alpha2) << ',' << format_double(theta) << '\n';
      }

      const Eigen::VectorXd sizes = firm_sizes(plan, firms_m.weights());
      std::ofstream fs(mt_out + "/firm_sizes.csv");
      if (!fs) throw std::runtime_error("cannot write firm_sizes.csv");
      fs << "alpha2,N\n";
      for (Eigen::Index i = 0; i < sizes.size(); ++i) {
        fs << format_double(firms_m.points()(i, 2)) << ',' << format_double(sizes[i])
           << '\n';
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "wotkit: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "wotkit: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "wotkit: " << e.what() << '\n';
    return kExitConfig;
  }

  return kExitConfig;
}

}  // namespace wotkit::cli
