#pragma once

// Command-line front end. Each subcommand is also callable in-process.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "respg/agents.hpp"
#include "respg/error.hpp"
#include "respg/metrics.hpp"

namespace respg::cli {

// 0 success, 2 config/usage, 3 data, 4 internal.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

int exit_code_for(Errc code) noexcept;

// Parses argv (argv[0] is the program name) and runs the subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct GenerateFlowsArgs {
  std::filesystem::path history;
  std::filesystem::path out;  // CSV; the stats sidecar goes to <out>.stats.csv
  std::size_t years = 100;
  std::uint64_t seed = 1;
  bool log_transform = true;
};

void cmd_generate_flows(const GenerateFlowsArgs& args);

struct TrainArgs {
  agents::AgentKind kind = agents::AgentKind::Td3;
  agents::AgentConfig agent = agents::AgentConfig::defaults(agents::AgentKind::Td3);
  std::filesystem::path reservoir;  // empty: bundled fixture
  std::optional<double> penalty_coefficient;
  std::filesystem::path flows;  // historical inflow CSV
  std::filesystem::path history;  // history for synthetic inflows
  std::size_t synthetic_years = 0;
  std::uint64_t synthetic_seed = 1;
  int episodes = 100;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;  // parallel workers, one output subdirectory each
  std::filesystem::path out;
};

// Raw key/value settings (config file first, flags overriding) resolved into
// TrainArgs. Agent hyperparameters start from the agent kind's defaults.
// Throws ConfigInvalid on unknown keys or unparseable values.
TrainArgs resolve_train_args(const std::map<std::string, std::string>& settings);

// Keys accepted by `train` (config file and same-named flags), as
// (section, key) pairs.
const std::vector<std::pair<std::string, std::string>>& train_keys();

void cmd_train(const TrainArgs& args);

struct FactorOverride {
  double rel, res, vul, max_deficit;
};

struct EvaluateArgs {
  std::string policy;  // sop | random | replay | checkpoint directory
  std::filesystem::path flows;
  std::filesystem::path reservoir;  // empty: bundled fixture
  std::filesystem::path releases;   // replay only
  std::uint64_t seed = 1;           // random only
  std::filesystem::path out;        // directory: trajectory.csv, report.csv
  std::string label;                // report method name; defaults to the policy
  // Test hook: replaces the computed factors before SI is derived.
  std::optional<FactorOverride> factors;
};

struct EvaluateResult {
  metrics::PerformanceReport report;
  std::size_t clipped = 0;
};

EvaluateResult cmd_evaluate(const EvaluateArgs& args);

struct ReportArgs {
  std::vector<std::pair<std::string, std::filesystem::path>> inputs;  // (label, trajectory CSV)
  std::filesystem::path reservoir;  // demand schedule; empty: bundled fixture
  std::filesystem::path out;        // directory
};

// comparison.csv plus plot_storage.csv, plot_release.csv,
// plot_annual_deficit.csv and plot_annual_power.csv. Throws NoInputs.
void cmd_report(const ReportArgs& args);

// Water-year sums of monthly deficits over annual demand, in percent.
std::vector<std::pair<int, double>> annual_deficit_percent(const metrics::Trajectory& traj);

}  // namespace respg::cli
