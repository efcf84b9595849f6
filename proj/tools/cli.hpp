#pragma once

#include <string>
#include <vector>

namespace plhom::cli {

/// Everything a run needs, serializable to/from the JSON config format.
/// Flags given on the command line override values loaded via --config.
struct RunConfig {
  std::string subcommand;
  double p = 2.0;
  double length = 1.0;
  double eps = 0.25;
  int k = 1;
  std::string weight = "two-plus-sin";
  std::string coefficient = "constant,1";
  double tol = 1e-8;
  std::string mode = "phase";
  double bracket_lo = 0.0, bracket_hi = 0.0;
  std::vector<double> eps_list;
  std::vector<int> k_list;
  int k_max = 8;
  int figure_id = 1;
  int resolution = 100;
  int samples = 512;
  std::string theorem = "teo1d";
  int n_dim = 1;
  double alpha = 1.0, beta = 1.0;
  bool csv = false;
  bool observed = false;
  std::string out;
};

std::string to_json(const RunConfig& cfg);
RunConfig from_json(const std::string& text);

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 solver failure, 2 usage or validation error.
int run(int argc, const char* const* argv);

}  // namespace plhom::cli
