#pragma once

#include <string>
#include <vector>

#include "wotkit/bregman.hpp"
#include "wotkit/costs.hpp"
#include "wotkit/dual.hpp"
#include "wotkit/primal.hpp"

namespace wotkit::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;       // invalid config / unreadable input
inline constexpr int kExitNoConverge = 3;   // solver finished without certificate

/// Resolved run configuration; JSON config files and command-line flags both
/// land here. Unknown JSON keys are rejected.
struct RunConfig {
  std::string problem = "wot";  // ot | eot | wot | wotuk
  std::string cost = "ces-barycentric";  // linear | ces-barycentric | ces-conical
  std::string solver = "primal";         // primal | dual
  std::string firms;
  std::string workers;
  std::string cost_matrix;  // linear cost CSV
  std::string out_dir = ".";
  long seed = 0;
  CesParams ces;
  SinkhornConfig eot = [] {
    SinkhornConfig c;
    c.marginal_tol = 1e-6;
    return c;
  }();
  PrimalConfig primal;
  DualConfig dual;
};

/// Entry point used by the wotkit binary and by the tests; returns the
/// process exit code. args excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace wotkit::cli
