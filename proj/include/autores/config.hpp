#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "autores/ensemble.hpp"
#include "autores/model.hpp"
#include "autores/params.hpp"

namespace autores {

/// One swept axis: detuning, amplitude or rate (or none).
struct SweepSpec {
  std::string parameter = "none";
  double start = 0;
  double stop = 0;
  int steps = 1;
  bool log_spacing = false;

  std::vector<double> values() const;
};

/// Amplitude grid for the per-detuning S-curves of a threshold map.
struct AmplitudeGridSpec {
  bool relative = true;
  double start = 0.85;
  double stop = 1.15;
  int steps = 16;

  std::vector<double> values() const;
};

struct AnalysisSpec {
  int qubit_init = 0;
  double cut_fraction = 0.5;
  InitialNoise noise = InitialNoise::vacuum;
  std::optional<double> t_capture;  ///< ns; median capture time when unset
  Coupling coupling = Coupling::rwa;
  int max_excitation = 6;
  std::vector<int> manifolds{4, 5};
  bool all_pairs = false;  ///< report crossings for every adjacent label pair, not only q = 0/1
  int n_fit = 5;
  double crossing_window = 0.05;  ///< GHz
  bool dynamical = false;
  double pump_detuning = -0.05;  ///< GHz, pump minus cavity
  std::vector<double> pump_nbar{0.25, 0.5, 0.75, 1.0};
  double probe_amp = 1e-5;  ///< GHz
};

/// Everything a run depends on. Parsed from INI-like text:
///   [section]
///   key = value   # comment
struct RunConfig {
  SystemParams system;
  ChirpPulse pulse;
  SweepSpec sweep;
  Engine engine = Engine::semiclassical;
  int n_runs = 400;
  std::uint64_t seed0 = 1;
  double sample_dt = 1.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  AmplitudeGridSpec scurve;
  AnalysisSpec analysis;
  std::string output_dir = "out";

  /// Throws ConfigError with a "section.key" path.
  void validate() const;

  /// Canonical (section.key, value) list; excludes the output directory.
  std::vector<std::pair<std::string, std::string>> entries() const;
  /// Canonical config text; parse_config(to_text()) reproduces *this.
  std::string to_text() const;
  /// Git blob hash (SHA-1) of to_text().
  std::string content_hash() const;

  EnsembleSettings ensemble(int jobs) const;
};

RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path);
/// Rebuilds a config from "section.key" metadata entries; other keys are ignored.
RunConfig config_from_metadata(const std::vector<std::pair<std::string, std::string>>& meta);

std::string git_blob_sha1(const std::string& content);

}  // namespace autores
