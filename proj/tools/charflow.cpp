#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "charflow/commands.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace charflow;
  CLI::App app{"Closed characteristics on star-shaped hypersurfaces: survey, analyze, verify, table."};
  app.require_subcommand(1);
  CommandOptions opt;
  std::string checks = "all";

  auto* survey = app.add_subcommand("survey", "Find prime closed characteristics and write an orbit database");
  survey->add_option("--config", opt.config, "Surface config (JSON)")->required();
  survey->add_option("--out", opt.out, "Orbit database to write")->required();
  survey->add_option("--seed", opt.seed, "Seed for the deterministic seed grid");
  survey->add_option("--seeds", opt.seeds, "Number of shooting seeds");

  auto* analyze = app.add_subcommand("analyze", "Compute Floquet data, indices and average Euler characteristics");
  analyze->add_option("--config", opt.config, "Surface config (JSON)")->required();
  analyze->add_option("--db", opt.db, "Orbit database")->required();
  analyze->add_option("--out", opt.out, "Dossier file to write")->required();
  analyze->add_option("--m-max", opt.m_max, "Largest iterate to index")->check(CLI::Range(2, 100000));

  auto* verify = app.add_subcommand("verify", "Evaluate identities and verdicts over the dossiers");
  verify->add_option("--config", opt.config, "Surface config (JSON)")->required();
  verify->add_option("--db", opt.db, "Dossier file")->required();
  verify->add_option("--out", opt.out, "Verdict report to write")->required();
  verify->add_option("--tol", opt.tol, "Identity tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--checks", checks, "Comma-separated checks, or 'all'");

  auto* table = app.add_subcommand("table", "Print one row per orbit");
  table->add_option("--db", opt.db, "Dossier file")->required();
  table->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  table->add_option("--out", opt.out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  opt.checks = split_list(checks);

  if (survey->parsed()) return cmd_survey(opt, std::cerr);
  if (analyze->parsed()) return cmd_analyze(opt, std::cerr);
  if (verify->parsed()) return cmd_verify(opt, std::cerr);
  return cmd_table(opt, std::cout, std::cerr);
}
