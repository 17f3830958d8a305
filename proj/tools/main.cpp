#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Panel-data epidemic econometrics toolkit"};
  app.require_subcommand(1);

  epipanel::cli::CommonArgs args;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "root RNG seed");
    cmd->add_option("--jobs", args.jobs, "worker threads for independent fits");
  };

  auto* prepare =
      app.add_subcommand("prepare", "validate and transform raw panel data");
  add_common(prepare);

  auto* fit = app.add_subcommand("fit", "run one regression specification");
  add_common(fit);
  fit->add_option("--estimator", args.estimator_override,
                  "estimator override: fe, bc, or cbc")
      ->check(CLI::IsMember({"fe", "bc", "cbc"}));

  auto* simulate =
      app.add_subcommand("simulate", "generate a synthetic panel with known truth");
  add_common(simulate);

  auto* did = app.add_subcommand("did", "event-study and group-time ATT analyses");
  add_common(did);

  auto* grid = app.add_subcommand("grid", "run the sensitivity grid");
  add_common(grid);

  CLI11_PARSE(app, argc, argv);

  if (prepare->parsed()) return epipanel::cli::cmd_prepare(args);
  if (fit->parsed()) return epipanel::cli::cmd_fit(args);
  if (simulate->parsed()) return epipanel::cli::cmd_simulate(args);
  if (did->parsed()) return epipanel::cli::cmd_did(args);
  if (grid->parsed()) return epipanel::cli::cmd_grid(args);
  return 1;
}
