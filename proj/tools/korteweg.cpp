#include <string>

#include "CLI11.hpp"
#include "korteweg/workbench.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Capillary-fluid workbench: spectral runs, viscous-limit sweeps, "
      "relative-entropy certificates and the inequality suite"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::string candidate;
  std::string reference;
  std::string functional = "euk";

  CLI::App* run = app.add_subcommand("run", "Simulate a scenario into a run directory");
  run->add_option("config", config, "scenario config (JSON)")->required();
  run->add_option("--out", out, "override the config's output_dir");

  CLI::App* sweep =
      app.add_subcommand("sweep", "Viscosity sweep against the shared inviscid limit run");
  sweep->add_option("config", config, "sweep config (JSON)")->required();
  sweep->add_option("--out", out, "override the config's output_dir");

  CLI::App* compare = app.add_subcommand(
      "compare", "Relative-entropy series and certificate: candidate run vs reference");
  compare->add_option("candidate", candidate, "candidate run directory")->required();
  compare->add_option("reference", reference, "reference run directory or scenario spec (JSON)")
      ->required();
  compare->add_option("--functional", functional, "euk | nsk | glt (default euk)");
  compare->add_option("--out", out, "output directory (default <candidate>/compare_<functional>)");

  CLI::App* lemmas = app.add_subcommand("lemmas", "Identity checks and sup-ratio bounds");
  lemmas->add_option("config", config, "lemma suite config (JSON)")->required();
  lemmas->add_option("--out", out, "override the config's output_dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : korteweg::exit_config_error;
  }

  if (run->parsed()) return korteweg::run_command(config, out);
  if (sweep->parsed()) return korteweg::sweep_command(config, out);
  if (compare->parsed()) return korteweg::compare_command(candidate, reference, functional, out);
  if (lemmas->parsed()) return korteweg::lemmas_command(config, out);
  return korteweg::exit_config_error;
}
