#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bergman/group.hpp"

namespace bergman::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBoundFailure = 3;
inline constexpr int kExitBudget = 4;

/// Environment variable consulted for the default worker count.
inline constexpr const char* kThreadsEnvVar = "BERGMAN_THREADS";

struct Tolerances {
  double bound_check_rel = 1e-9;  ///< pass/fail tolerance on bound right sides
  double dedup_abs = kDedupTol;   ///< element dedup tolerance
  double tail_target = 1e-7;      ///< relative series tail aimed for by pruning
};

struct GridSpec {
  double x0 = 0.0, x1 = 0.0;
  int nx = 0;
  double y0 = 0.0, y1 = 0.0;
  int ny = 0;
};

/// Resolved run configuration; command-line flags override config-file
/// values, which override the defaults here. The worker count is an
/// execution detail and never enters reports.
struct RunConfig {
  std::string command;
  std::string group = "bolza";
  std::vector<int> k_values = {3, 6, 12};
  std::vector<std::array<double, 2>> points;
  std::optional<GridSpec> grid;
  int max_word_length = 10;
  std::size_t element_cap = kDefaultElementCap;
  std::optional<int> d;
  std::string output = "out";
  int threads = 0;  ///< 0 = BERGMAN_THREADS or hardware concurrency
  bool prune = true;
  std::optional<double> prune_cutoff;  ///< explicit displacement cutoff
  Tolerances tol;
};

/// Applies a JSON config document over `base`.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// Full flag parsing: `bergman <command> [--config file] [flags...]`.
/// Precedence: flags > config file > defaults.
RunConfig parse_args(const std::vector<std::string>& args);

/// The point list the run evaluates at, in canonical order.
std::vector<HPoint> resolve_points(const RunConfig& config);

struct RunOutput {
  int exit_code = kExitOk;
  nlohmann::ordered_json report;
  std::vector<std::string> files_written;
};

/// Executes a parsed config: computes, writes <command>_report.json and
/// <command>.csv under config.output, and returns the payload. Identical
/// configs produce byte-identical payloads regardless of the worker count.
RunOutput run(const RunConfig& config);

RunOutput run_kernel(const RunConfig& config);
RunOutput run_verify(const RunConfig& config);
RunOutput run_symd(const RunConfig& config);
RunOutput run_injectivity(const RunConfig& config);

/// argv-level entry point used by the binary: parses, runs, prints a summary,
/// maps errors to exit codes.
int main_entry(int argc, const char* const* argv);

}  // namespace bergman::cli
