#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kspec::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kPrecondition = 2;
inline constexpr int kTrust = 3;
inline constexpr int kUsage = 64;

struct SurfaceSpec {
  std::string model = "sphere";  // sphere | torus | point (product second factor only)
  int lmax = 8;
  std::string lattice = "square";
  double radius = 1.0;
  std::string potential;  // file, "random:SEED[:AMP[:DEG]]", or empty for φ = 0
};

struct RunConfig {
  std::string subcommand;
  SurfaceSpec surface;
  SurfaceSpec second;  // product only
  std::string direction;
  std::string input;
  std::string out_dir;
  int k = 1;
  int n = 10;
  int max_steps = 200;
  int max_iters = 500;
  double tol_cluster = 1e-6;
  double tol_cert = 1e-7;
  double tol = 1e-6;
  double eps_pos = 1e-8;
  std::vector<double> h_list{1e-3, 5e-4, 2.5e-4};
  bool lift = false;
  long long seed = 0;  // reserved; every algorithm is deterministic
};

// Runs one command line (without the program name). JSON results go to
// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kspec::cli
