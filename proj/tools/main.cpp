#include <iostream>

#include "CLI11.hpp"

#include "flagcert_cli/commands.hpp"
#include "flagcert_cli/output.hpp"

int main(int argc, char** argv) {
  using namespace flagcert::cli;

  CLI::App app{"Ping-pong certificates, limit sets and contraction rates for projective group actions"};
  app.set_version_flag("--version", std::string("flagcert ") + kToolVersion);
  app.require_subcommand(1);

  CommandOptions options;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  app.add_option("--config", options.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--skip-certify", options.skip_certify, "Sample without certifying first");
  app.add_option("--out", options.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--svg", options.svg, "Also render limit sets as SVG (d <= 3)");

  const char* help[] = {"Verify every compatibility inclusion of the Gamma-graph",
                        "Sample the limit set along random contracting paths",
                        "Fit exponential shrink rates of nested images",
                        "Certify along deformation paths over a t-grid",
                        "Build an automaton for a group acting on RP^1",
                        "Singular-value gap trace of a matrix sequence",
                        "Cross-ratio distance between two points of a domain"};
  for (std::size_t i = 0; i < command_names().size(); ++i)
    app.add_subcommand(command_names()[i], help[i])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }
  if (seed_opt->count() > 0) options.seed = seed;
  if (threads_opt->count() > 0) options.threads = threads;
  return run_command(app.get_subcommands().front()->get_name(), options, std::cout, std::cerr);
}
