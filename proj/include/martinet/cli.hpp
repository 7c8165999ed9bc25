#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace martinet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitInconclusive = 3;

struct RunConfig {
  std::string command;
  double alpha = 2.0;
  double p = 2.0;
  double eps0 = 0.1;
  std::uint64_t seed = 1;
  std::int64_t samples = 0;  // 0: per-command default
  int segments = 8;
  int starts = 16;
  double tol = 1e-8;
  std::string from;
  std::string to;
  double r = 1.0;
  std::string center = "1,0,0";
  std::string function = "gauss";
  std::string chain_case = "auto";
  std::string output;
  std::string format = "json";
  std::string dump;
  unsigned threads = 0;
};

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out` (or --output), diagnostics and usage text to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace martinet
