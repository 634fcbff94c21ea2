#ifndef OPFRAME_REPORT_HPP
#define OPFRAME_REPORT_HPP

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "opframe/scenario.hpp"

namespace opframe {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotFrame = 2;
inline constexpr int kExitUsage = 64;

struct RunOptions {
  std::optional<double> tol;
  std::optional<int> nodes;
  std::uint64_t seed = 0;
  bool timings = false;
  // reconstruct
  std::optional<std::string> method;
  std::optional<std::string> relaxation;
  std::optional<int> max_iter;
  // perturb
  std::optional<double> c;
  bool k_identity = false;
};

struct RunResult {
  nlohmann::json report;
  int exit_code = kExitOk;
  // One-line human-readable summary for stderr when the run did not succeed.
  std::string message;
};

// Applies --nodes and the subcommand-specific --tol override to a scenario,
// so that the echoed scenario records the values actually used.
Scenario with_overrides(Scenario scenario, const std::string &command,
                        const RunOptions &options);

RunResult run_analyze(const Scenario &scenario, const RunOptions &options);
RunResult run_reconstruct(const Scenario &scenario, const RunOptions &options);
RunResult run_dual(const Scenario &scenario, const RunOptions &options);
RunResult run_perturb(const Scenario &scenario, const RunOptions &options);
RunResult run_independence(const Scenario &scenario, const RunOptions &options);

nlohmann::json frame_report_to_json(const FrameReport<double> &report);

// Flattens a report to "key,value" rows; arrays become one row per element,
// so the spectrum lands one eigenvalue per row. The scenario echo is omitted.
std::string to_csv(const nlohmann::json &report);

} // namespace opframe

#endif // OPFRAME_REPORT_HPP
