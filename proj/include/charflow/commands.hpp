#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace charflow {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIdentityFailed = 1;
inline constexpr int kExitUsage = 2;

/// Parameters of one command invocation. `db` is the input artifact: the
/// orbit database for analyze, the dossier file for verify and table.
struct CommandOptions {
  std::string config;
  std::string db;
  std::string out;
  std::uint64_t seed = 0;
  int m_max = 20;
  double tol = 1e-6;
  std::vector<std::string> checks{"all"};
  std::string format = "csv";
  /// Survey seeds (0: config value, else 48).
  int seeds = 0;
};

/// Each command returns its exit code; diagnostics go to `err`.
int cmd_survey(const CommandOptions& opt, std::ostream& err);
int cmd_analyze(const CommandOptions& opt, std::ostream& err);
int cmd_verify(const CommandOptions& opt, std::ostream& err);
int cmd_table(const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace charflow
