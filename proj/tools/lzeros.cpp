#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "lzeros/config.hpp"
#include "lzeros/errors.hpp"
#include "lzeros/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeros of survival amplitudes in the complex-time plane"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool mirror_beta = false;

  for (const char* name : {"quench", "envelope", "zeros", "compare", "gaussian", "twoband", "heatmap"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "Run configuration (TOML, or JSON by extension)")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides outputs.directory)");
    sub->add_option("--seed", seed, "Seed for boundary jitter (overrides window.seed)");
    sub->add_flag("--mirror-beta", mirror_beta, "Draw heatmaps in the (-beta, t) orientation");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const auto* sub = app.get_subcommands().front();
  try {
    lzeros::RunConfig config = lzeros::RunConfig::load(config_path);
    lzeros::RunOptions options;
    if (sub->count("--out")) options.out_dir = out_dir;
    if (sub->count("--seed")) options.seed = seed;
    options.mirror_beta = mirror_beta;
    lzeros::apply_options(config, options);

    const auto report = lzeros::run_command(lzeros::parse_command(sub->get_name()), config);
    std::cout << report.to_json().dump(2) << '\n';
  } catch (const lzeros::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const lzeros::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const lzeros::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
