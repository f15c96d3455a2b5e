#pragma once

// Subcommand drivers behind the `semicircle` executable. They write the
// primary output to `out`, diagnostics to `err`, and return the exit code.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace semicircle::cli {

enum ExitCode : int { kOk = 0, kBadInput = 1, kNumerical = 2, kUndecided = 3 };

struct Options {
  std::string input;
  std::string out;  // empty: stdout
  double tol = 1e-10;
  int max_iter = 100000;
  std::uint64_t seed = 42;
  std::vector<double> eps = {1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6};
  double x_min = -3.0;
  double x_max = 3.0;
  int points = 601;
  std::string format = "csv";  // density: csv | json
  unsigned threads = 0;
  int trials = 20;
};

/// "1e-2,3e-3" -> {0.01, 0.003}. Throws InvalidInput on junk.
std::vector<double> parse_eps_list(const std::string& text);

int cmd_classify(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_density(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_scale(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_capacity(const Options& opt, std::ostream& out, std::ostream& err);
int cmd_verify(const Options& opt, std::ostream& out, std::ostream& err);

}  // namespace semicircle::cli
