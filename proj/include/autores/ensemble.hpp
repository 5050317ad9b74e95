#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "autores/analysis.hpp"
#include "autores/dynamics_quantum.hpp"
#include "autores/semiclassical.hpp"

namespace autores {

enum class Engine { quantum, semiclassical };

std::string engine_name(Engine e);
/// Throws ConfigError on unknown names.
Engine parse_engine(const std::string& name);

struct EnsembleSettings {
  Engine engine = Engine::semiclassical;
  int n_runs = 400;
  std::uint64_t seed0 = 1;
  int jobs = 1;
  double cut_fraction = 0.5;
  InitialNoise noise = InitialNoise::vacuum;  ///< semiclassical engine only
  TrajectoryOptions traj;
  IntegrationOptions integ;
};

/// Capture probability over an amplitude grid. Run k uses stream_seed(seed0, k)
/// at every amplitude and for both qubit states, so curves share their noise
/// realizations and differences between them are not sampling artifacts.
SCurve run_scurve(const SystemParams& p, const ChirpPulse& pulse, const std::vector<double>& amplitudes,
                  int qubit_init, const EnsembleSettings& s);

struct MapGrid {
  std::vector<double> amplitudes;
  /// Amplitudes are multiples of the noiseless ground-state threshold at each
  /// detuning rather than absolute values.
  bool relative = false;
};

/// S-curves and fitted thresholds for both qubit states at each detuning.
/// Points within crossing_window of any entry of crossing_detunings are
/// flagged. Failures are recorded per row and do not stop the map.
std::vector<ThresholdMapRow> threshold_map(const SystemParams& p, const std::vector<double>& detunings,
                                           const ChirpPulse& pulse, const MapGrid& grid, const EnsembleSettings& s,
                                           const std::vector<double>& crossing_detunings = {},
                                           double crossing_window = 0.05);

}  // namespace autores
