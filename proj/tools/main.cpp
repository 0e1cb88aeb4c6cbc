#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vascogen/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vascogen: synthetic vascular tree generation"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "grow a tree from a config file");
  vascogen::GenerateArgs gargs;
  std::vector<std::string> set_pairs;
  gen->add_option("--config", gargs.config_path, "run configuration (.cco)")->required();
  gen->add_option("--set", set_pairs, "override a config key (KEY=VALUE, repeatable)");
  gen->add_flag("--svg", gargs.svg, "also write an SVG rendering (2D only)");
  gen->add_option("--log", gargs.log_path, "write the per-step evaluation log here");
  gen->add_option("--out", gargs.out_path, "tree CSV output path (overrides output.tree)");
  gen->add_option("--threads", gargs.threads, "candidate evaluation threads")
      ->check(CLI::PositiveNumber);

  // validate
  auto* val = app.add_subcommand("validate", "validate a saved tree against a config");
  std::string val_tree, val_config;
  val->add_option("tree", val_tree, "tree CSV")->required();
  val->add_option("--config", val_config, "run configuration (.cco)")->required();

  // stats
  auto* st = app.add_subcommand("stats", "print statistics of a saved tree");
  std::string stats_tree;
  st->add_option("tree", stats_tree, "tree CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? vascogen::exit_input_error : vascogen::exit_ok;
  }

  if (gen->parsed()) {
    for (const auto& kv : set_pairs) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "error: --set expects KEY=VALUE, got '" << kv << "'\n";
        return vascogen::exit_input_error;
      }
      gargs.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return vascogen::cmd_generate(gargs, std::cout, std::cerr);
  }
  if (val->parsed()) return vascogen::cmd_validate(val_tree, val_config, std::cout, std::cerr);
  if (st->parsed()) return vascogen::cmd_stats(stats_tree, std::cout, std::cerr);
  return vascogen::exit_input_error;
}
