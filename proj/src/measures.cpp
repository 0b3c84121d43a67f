#include "wotkit/measures.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wotkit {

DiscreteMeasure::DiscreteMeasure(Eigen::MatrixXd points, Eigen::VectorXd weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (weights_.size() < 1) {
    throw std::invalid_argument("DiscreteMeasure: needs at least one atom");
  }
  if (points_.rows() != weights_.size()) {
    throw std::invalid_argument("DiscreteMeasure: points/weights length mismatch");
  }
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] <= 0.0) {
      throw std::invalid_argument("DiscreteMeasure: weights must be finite and > 0");
    }
  }
  if (!points_.allFinite()) {
    throw std::invalid_argument("DiscreteMeasure: points must be finite");
  }
  const double sum = weights_.sum();
  if (!std::isfinite(sum) || sum <= 0.0) {
    throw std::invalid_argument("DiscreteMeasure: weight sum must be positive");
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    weights_ /= sum;  // renormalize exactly once
  }
}

std::string problem_name(ProblemKind p) {
  return p == ProblemKind::Wot ? "wot" : "wotuk";
}

ProblemKind problem_from_name(const std::string& name) {
  if (name == "wot") return ProblemKind::Wot;
  if (name == "wotuk") return ProblemKind::Wotuk;
  throw std::invalid_argument("unknown problem kind: " + name);
}

Eigen::VectorXd row_sums(const Eigen::MatrixXd& P) { return P.rowwise().sum(); }

Eigen::VectorXd col_sums(const Eigen::MatrixXd& P) { return P.colwise().sum().transpose(); }

FeasibilityResiduals feasibility_residuals(const Eigen::MatrixXd& P,
                                           const Eigen::VectorXd& a,
                                           const Eigen::VectorXd& b,
                                           ProblemKind problem) {
  if (P.rows() != a.size() || P.cols() != b.size()) {
    throw std::invalid_argument("feasibility_residuals: shape mismatch");
  }
  FeasibilityResiduals r;
  r.col_inf = (col_sums(P) - b).lpNorm<Eigen::Infinity>();
  if (problem == ProblemKind::Wot) {
    r.row_inf = (row_sums(P) - a).lpNorm<Eigen::Infinity>();
  } else {
    r.row_inf = 0.0;  // first marginal unconstrained
  }
  return r;
}

Eigen::VectorXd firm_sizes(const Eigen::MatrixXd& P, const Eigen::VectorXd& a) {
  if (P.rows() != a.size()) {
    throw std::invalid_argument("firm_sizes: shape mismatch");
  }
  return row_sums(P).cwiseQuotient(a);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin) {
    throw std::runtime_error(path + ": bad numeric field '" + s + "'");
  }
  return v;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

DiscreteMeasure read_measure_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file: " + path);

  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error(path + ": empty measure file");
  }
  auto cols = split_csv_line(header);
  if (cols.size() < 2 || trim(cols.back()) != "weight") {
    throw std::runtime_error(path + ": expected header ending in 'weight'");
  }
  const int dim = static_cast<int>(cols.size()) - 1;

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != dim + 1) {
      throw std::runtime_error(path + ": row with wrong column count");
    }
    std::vector<double> vals;
    vals.reserve(fields.size());
    for (const auto& f : fields) vals.push_back(parse_double(trim(f), path));
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), dim);
  Eigen::VectorXd w(static_cast<Eigen::Index>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int d = 0; d < dim; ++d) pts(static_cast<Eigen::Index>(i), d) = rows[i][d];
    w[static_cast<Eigen::Index>(i)] = rows[i][dim];
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

void write_measure_csv(const std::string& path, const DiscreteMeasure& m,
                       const std::vector<std::string>& coord_names) {
  if (static_cast<Eigen::Index>(coord_names.size()) != m.dim()) {
    throw std::invalid_argument("write_measure_csv: coordinate name count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write measure file: " + path);
  for (const auto& c : coord_names) out << c << ',';
  out << "weight\n";
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    for (Eigen::Index d = 0; d < m.dim(); ++d) {
      out << format_double(m.points()(i, d)) << ',';
    }
    out << format_double(m.weights()[i]) << '\n';
  }
}

Eigen::MatrixXd read_plan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty plan file");
  const int m = static_cast<int>(split_csv_line(header).size());

  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != m) {
      throw std::runtime_error(path + ": plan row with wrong column count");
    }
    std::vector<double> vals;
    vals.reserve(fields.size());
    for (const auto& f : fields) vals.push_back(parse_double(trim(f), path));
    rows.push_back(std::move(vals));
  }
  Eigen::MatrixXd P(static_cast<Eigen::Index>(rows.size()), m);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < m; ++j) P(static_cast<Eigen::Index>(i), j) = rows[i][j];
  return P;
}

void write_plan_csv(const std::string& path, const Eigen::MatrixXd& P) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write plan file: " + path);
  for (Eigen::Index j = 0; j < P.cols(); ++j) {
    if (j > 0) out << ',';
    out << j;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(P(i, j));
    }
    out << '\n';
  }
}

std::vector<std::string> firm_coord_names() { return {"z", "alpha1", "alpha2"}; }

std::vector<std::string> worker_coord_names() { return {"x1", "x2"}; }

std::vector<std::string> generic_coord_names(int dim) {
  std::vector<std::string> names;
  names.reserve(dim);
  for (int d = 1; d <= dim; ++d) names.push_back("c" + std::to_string(d));
  return names;
}

}  // namespace wotkit
