#include <chisel/experiment.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <string>
#include <vector>

namespace {

void add_common(CLI::App* cmd, chisel::ExperimentSpec& spec, std::vector<std::string>& sets) {
  cmd->add_option("--config", spec.config_path, "JSON config file (defaults apply when omitted)");
  cmd->add_option("--out", spec.out_dir, "output directory")->required();
  cmd->add_option("--set", sets, "dotted-key overrides, key=value")->take_all();
  cmd->add_option("--save-every", spec.save_every, "snapshot save interval in steps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--workers", spec.workers, "concurrent runs for study commands")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cahn-Hilliard strip solver with dynamic boundary conditions"};
  app.require_subcommand(1);

  chisel::ExperimentSpec spec;
  spec.workers = 1;
  if (const char* env = std::getenv("CHISEL_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) spec.workers = w;
  }
  std::vector<std::string> sets;

  for (const char* name : {"run", "eps-study", "perturb-study", "convergence", "check-potentials"}) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common(cmd, spec, sets);
  }

  CLI11_PARSE(app, argc, argv);

  spec.command = app.get_subcommands().front()->get_name();
  for (const auto& s : sets) {
    auto pos = s.find('=');
    if (pos == std::string::npos) {
      std::fprintf(stderr, "--set expects key=value, got \"%s\"\n", s.c_str());
      return 2;
    }
    spec.overrides.emplace_back(s.substr(0, pos), s.substr(pos + 1));
  }
  return chisel::run_experiment(spec);
}
