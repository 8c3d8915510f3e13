#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nbound/core.hpp"
#include "nbound/report.hpp"
#include "nbound/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Neumann eigenvalue bounds for power-law cusp domains"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(nb::kVersion));

  std::string cmd;
  nb::RunConfig cfg;
  std::string format = "json";
  std::optional<double> h, p;
  std::optional<int> grading_levels, restarts;

  app.add_option("--cmd", cmd, "bound | classical | verify-constants | eig | capacity | sweep")
      ->required()
      ->check(CLI::IsMember({"bound", "classical", "verify-constants", "eig", "capacity", "sweep"}));
  app.add_option("--config", cfg.input, "flat key = value config file");
  app.add_option("--out", cfg.output, "report path (stdout when omitted)");
  app.add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", cfg.seed, "seed for randomized restarts");
  app.add_option("--h", h, "mesh size (overrides config key h)");
  app.add_option("--grading-levels", grading_levels, "tip grading levels (overrides grading_levels)");
  app.add_option("--p", p, "exponent p (overrides config key p)");
  app.add_option("--restarts", restarts, "random restarts of the Rayleigh descent (overrides restarts)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nb::kExitConfig;
  }

  cfg.command = *nb::parse_command(cmd);
  cfg.format = *nb::parse_format(format);
  if (h) cfg.overrides["h"] = nb::format_double(*h);
  if (p) cfg.overrides["p"] = nb::format_double(*p);
  if (grading_levels) cfg.overrides["grading_levels"] = std::to_string(*grading_levels);
  if (restarts) cfg.overrides["restarts"] = std::to_string(*restarts);
  return nb::run(cfg, std::cerr);
}
