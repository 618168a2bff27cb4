#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <compest/error.hpp>

#include "compest_tools/config.hpp"
#include "compest_tools/experiment.hpp"

namespace {

using compest::tools::Command;
using compest::tools::ExperimentConfig;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> months;
  std::optional<int> parallel;
  bool quiet = false;
};

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : compest::tools::load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (o.out) c.output = *o.out;
  if (o.months) c.months = *o.months;
  if (o.parallel) c.parallel = *o.parallel;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact design-based evaluation of composite estimators on a 4-8-4 rotating panel"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Override the configured seed");
  app.add_option("--out", o.out, "Override the output directory");
  app.add_option("--months", o.months, "Override the number of months");
  app.add_option("--parallel", o.parallel, "Worker threads");
  app.add_flag("--quiet", o.quiet, "No progress output on stderr");

  const std::pair<const char*, Command> commands[] = {
      {"generate-population", Command::generate_population},
      {"audit-design", Command::audit_design},
      {"evaluate", Command::evaluate},
      {"optimize", Command::optimize},
      {"report", Command::report},
  };
  const char* help[] = {
      "Generate the configured populations and their summary",
      "Write the rotation chart and the inclusion/overlap audit",
      "Exact moments and relative-MSE tables of the configured estimators",
      "Optimal AK coefficients and the regression composite alpha grid",
      "Full experiment: every output of the other subcommands",
  };
  std::optional<Command> chosen;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    app.add_subcommand(commands[i].first, help[i])->callback([&chosen, c = commands[i].second] { chosen = c; });
  }
  bool validating = false;
  app.add_subcommand("validate", "Check the configuration and list every problem found")->callback([&] {
    validating = true;
  });

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig config = resolve(o);
    if (validating) {
      const auto problems = compest::tools::validate(config);
      for (const auto& p : problems) std::cout << p << "\n";
      if (problems.empty()) std::cout << "configuration is valid\n";
      return problems.empty() ? 0 : 1;
    }
    const compest::tools::Logger log = [quiet = o.quiet](const std::string& line) {
      if (!quiet) std::cerr << line << std::endl;
    };
    const auto files = compest::tools::run(config, *chosen, log);
    for (const auto& f : files) std::cout << (config.output / f).string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
