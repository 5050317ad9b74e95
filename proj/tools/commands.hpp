#pragma once

#include <filesystem>
#include <string>

#include "autores/config.hpp"

namespace arsim {

/// Process exit codes.
enum Exit : int { ok = 0, config_error = 2, numerical_error = 3, partial = 4 };

struct Context {
  std::string command;
  autores::RunConfig config;
  std::filesystem::path out;
  int jobs = 1;
};

/// Command-specific preconditions, checked before any compute.
void check(const Context& ctx);

int run_spectrum(const Context& ctx);
int run_nonlinearity(const Context& ctx);
int run_transmission(const Context& ctx);
int run_chirp(const Context& ctx);
int run_scurve(const Context& ctx);
int run_fidelity(const Context& ctx);
int run_threshold_map(const Context& ctx);
int run_scaling(const Context& ctx);

}  // namespace arsim
