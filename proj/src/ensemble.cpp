#include "autores/ensemble.hpp"

#include <cmath>
#include <limits>

#include "autores/error.hpp"
#include "autores/parallel.hpp"
#include "autores/rng.hpp"

namespace autores {

std::string engine_name(Engine e) { return e == Engine::quantum ? "quantum" : "semiclassical"; }

Engine parse_engine(const std::string& name) {
  if (name == "quantum") return Engine::quantum;
  if (name == "semiclassical") return Engine::semiclassical;
  throw ConfigError("engine.name must be 'quantum' or 'semiclassical', got '" + name + "'");
}

namespace {

SCurve semiclassical_scurve(const SystemParams& p, const ChirpPulse& pulse, const std::vector<double>& amplitudes,
                            int qubit_init, const EnsembleSettings& s) {
  const std::size_t na = amplitudes.size(), nr = s.n_runs;
  std::vector<CaptureResult> runs(na * nr);
  CaptureSettings cs;
  cs.noise = s.noise;
  cs.qubit_init = qubit_init;
  cs.cut_fraction = s.cut_fraction;
  cs.integ = s.integ;
  parallel_for(na * nr, s.jobs, [&](std::size_t job) {
    ChirpPulse q = pulse;
    q.amplitude = amplitudes[job / nr];
    runs[job] = ar_capture(p, q, stream_seed(s.seed0, job % nr), cs);
  });
  std::vector<int> captured(na, 0), trials(na, static_cast<int>(nr));
  std::vector<double> medians(na);
  for (std::size_t a = 0; a < na; ++a) {
    std::vector<double> times;
    for (std::size_t k = 0; k < nr; ++k) {
      const auto& r = runs[a * nr + k];
      if (r.captured) {
        ++captured[a];
        times.push_back(*r.capture_time);
      }
    }
    medians[a] = nan_median(std::move(times));
  }
  SCurve c = SCurve::from_counts(amplitudes, captured, trials, qubit_init, p.detuning);
  c.median_capture_time = medians;
  return c;
}

SCurve quantum_scurve(const SystemParams& p, const ChirpPulse& pulse, const std::vector<double>& amplitudes,
                      int qubit_init, const EnsembleSettings& s) {
  std::vector<int> captured, trials;
  std::vector<double> medians;
  for (double amp : amplitudes) {
    ChirpPulse q = pulse;
    q.amplitude = amp;
    const auto est = capture_probability_quantum(p, q, qubit_init, s.n_runs, s.seed0, s.traj, s.jobs, s.cut_fraction);
    const int valid = est.n_traj - est.n_aborted;
    captured.push_back(static_cast<int>(std::lround(est.probability * valid)));
    trials.push_back(valid);
    medians.push_back(nan_median(est.capture_times));
  }
  SCurve c = SCurve::from_counts(amplitudes, captured, trials, qubit_init, p.detuning);
  c.median_capture_time = medians;
  return c;
}

}  // namespace

SCurve run_scurve(const SystemParams& p, const ChirpPulse& pulse, const std::vector<double>& amplitudes,
                  int qubit_init, const EnsembleSettings& s) {
  if (s.n_runs < 1) throw ConfigError("ensemble.n_runs must be >= 1");
  if (amplitudes.empty()) throw ConfigError("amplitude grid is empty");
  if (qubit_init != 0 && qubit_init != 1) throw ConfigError("qubit_init must be 0 or 1");
  return s.engine == Engine::quantum ? quantum_scurve(p, pulse, amplitudes, qubit_init, s)
                                     : semiclassical_scurve(p, pulse, amplitudes, qubit_init, s);
}

std::vector<ThresholdMapRow> threshold_map(const SystemParams& p, const std::vector<double>& detunings,
                                           const ChirpPulse& pulse, const MapGrid& grid, const EnsembleSettings& s,
                                           const std::vector<double>& crossing_detunings, double crossing_window) {
  std::vector<ThresholdMapRow> rows;
  for (double d : detunings) {
    SystemParams pd = p;
    pd.detuning = d;
    bool near = false;
    for (double c : crossing_detunings) near = near || std::abs(d - c) <= crossing_window;
    double scale = 1.0;
    std::string scale_error;
    if (grid.relative) {
      try {
        scale = deterministic_threshold(pd, pulse, 0, 1e-3, s.integ);
      } catch (const std::exception& e) {
        scale_error = e.what();
      }
    }
    std::vector<double> amps;
    for (double a : grid.amplitudes) amps.push_back(a * scale);
    for (int q : {0, 1}) {
      ThresholdMapRow row;
      row.detuning = d;
      row.qubit_init = q;
      row.near_crossing = near;
      row.scale = grid.relative ? scale : std::numeric_limits<double>::quiet_NaN();
      if (!scale_error.empty()) {
        row.error = scale_error;
      } else {
        try {
          row.result = fit_threshold(run_scurve(pd, pulse, amps, q, s));
        } catch (const NumericalError& e) {
          row.error = e.what();
        } catch (const ConfigError& e) {
          row.error = e.what();
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace autores
