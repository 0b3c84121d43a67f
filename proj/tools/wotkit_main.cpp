#include <vector>

#include "wotkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return wotkit::cli::run(args);
}
