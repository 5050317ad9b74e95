#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>

#include "autores/error.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"arsim: autoresonant readout simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, engine;
  std::uint64_t seed = 0;
  int jobs = 1;

  const std::map<std::string, std::pair<std::string, std::function<int(const arsim::Context&)>>> commands{
      {"spectrum", {"dressed levels over detuning and their avoided crossings", arsim::run_spectrum}},
      {"nonlinearity", {"effective nonlinearity versus detuning", arsim::run_nonlinearity}},
      {"transmission", {"weak-probe transmission under an off-resonant pump", arsim::run_transmission}},
      {"chirp", {"single-shot and averaged chirp transients", arsim::run_chirp}},
      {"scurve", {"capture probability versus drive amplitude", arsim::run_scurve}},
      {"fidelity", {"ground/excited S-curves and readout fidelity", arsim::run_fidelity}},
      {"threshold-map", {"state-dependent thresholds versus detuning", arsim::run_threshold_map}},
      {"scaling", {"noiseless threshold versus chirp rate", arsim::run_scaling}},
  };
  for (const auto& [name, entry] : commands) {
    auto* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default: output.dir from the config)");
    sub->add_option("--seed", seed, "override ensemble.seed0");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--engine", engine, "override engine.name")->check(CLI::IsMember({"quantum", "semiclassical"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : arsim::Exit::config_error;
  }

  CLI::App* sub = app.get_subcommands().front();
  arsim::Context ctx;
  ctx.command = sub->get_name();
  ctx.jobs = jobs;
  try {
    ctx.config = autores::load_config(config_path);
    if (sub->count("--seed")) ctx.config.seed0 = seed;
    if (sub->count("--engine")) ctx.config.engine = autores::parse_engine(engine);
    if (sub->count("--out")) ctx.config.output_dir = out_dir;
    ctx.out = ctx.config.output_dir;
    arsim::check(ctx);
    std::filesystem::create_directories(ctx.out);
    return commands.at(ctx.command).second(ctx);
  } catch (const autores::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return arsim::Exit::config_error;
  } catch (const autores::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return arsim::Exit::numerical_error;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return arsim::Exit::config_error;
  }
}
