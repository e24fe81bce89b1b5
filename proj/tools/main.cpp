#include <CLI11.hpp>

#include <iostream>

#include "wake/errors.hpp"
#include "wake/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Time-periodic wake solver and kernel verification driver"};
  std::string config, mode, out;
  std::uint64_t seed = 0;
  bool quiet = false;
  app.add_option("--config", config, "key = value configuration file");
  app.add_option("--mode", mode, "solve | boundary-fit | extract | verify-kernels | linear-check (overrides the file)");
  app.add_option("--out", out, "output directory (overrides the file)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed of the boundary generator (overrides the file)");
  app.add_flag("--quiet", quiet, "no progress output");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << "error class=config Cli: " << e.what() << '\n';
    return wake::exit_code(wake::ErrorClass::config);
  }

  wake::RunConfig cfg;
  try {
    if (!config.empty()) cfg = wake::load_config(config);
    if (!mode.empty()) cfg.mode = wake::mode_from_name(mode);
    if (!out.empty()) cfg.out = out;
    if (*seed_opt) cfg.seed = seed;
  } catch (const wake::Error& e) {
    std::cerr << "error class=" << wake::class_name(e.error_class()) << " " << e.what() << '\n';
    return wake::exit_code(e.error_class());
  }
  return wake::run(cfg, std::cout, std::cerr, quiet);
}
