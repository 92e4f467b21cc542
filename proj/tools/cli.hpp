#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gct::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kUsage = 2,
  kNumerical = 3,
};

/// Parsed command line for one invocation.
struct RunConfig {
  std::string command;
  std::string scenario_path;
  std::string plan;  // file path or inline JSON object
  std::string mode = "factual";
  std::string engine = "quad";
  std::string format = "json";
  std::string out_path;  // empty means stdout
  std::size_t n = 1000;
  std::size_t oracle_n = 200000;
  std::size_t mc_n = 200000;
  int m = 200;
  int n_max = 4;
  std::optional<std::uint64_t> seed;
  std::vector<double> sigmas;
  int threads = 0;  // 0: GCT_THREADS or 1
};

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_gformula(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_mass(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bcurve(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv-style arguments (without the program name), dispatches, and
/// maps library errors onto exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gct::cli
