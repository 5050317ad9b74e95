#include "autores/params.hpp"

#include <cmath>
#include <string>

#include "autores/error.hpp"

namespace autores {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void SystemParams::validate() const {
  require(finite(cavity_freq) && cavity_freq > 0, "system.cavity_freq must be > 0");
  require(finite(kerr), "system.kerr must be finite");
  require(finite(ec) && ec > 0, "system.ec must be > 0");
  require(finite(ej) && ej > ec, "system.ej must exceed system.ec");
  // g01 = 0 is the decoupled limit used by the spectral checks.
  require(finite(g01) && g01 >= 0, "system.g01 must be >= 0");
  require(finite(detuning), "system.detuning must be finite");
  require(qubit_freq() > 0, "system.detuning puts the qubit frequency below zero");
  require(n_levels >= 2, "system.n_levels must be >= 2");
  require(n_photons >= 2, "system.n_photons must be >= 2");
  require(finite(kappa) && kappa > 0, "system.kappa must be > 0");
  require(finite(gamma1) && gamma1 >= 0, "system.gamma1 must be >= 0");
}

SystemParams device_params() { return SystemParams{}; }

double kappa_from_quality(double freq, double quality) {
  if (!(quality > 0)) throw ConfigError("quality factor must be > 0");
  return freq / quality;
}

double gamma1_from_t1(double t1_ns) {
  if (!(t1_ns > 0)) throw ConfigError("t1 must be > 0");
  return 1.0 / (kTwoPi * t1_ns);
}

double t1_from_gamma1(double gamma1) {
  return gamma1 > 0 ? 1.0 / (kTwoPi * gamma1) : INFINITY;
}

double ChirpPulse::envelope_at(double t) const {
  if (envelope == Envelope::rectangular || ramp <= 0) return 1.0;
  double edge = std::min(t, duration - t);
  if (edge >= ramp) return 1.0;
  if (edge <= 0) return 0.0;
  return 0.5 * (1.0 - std::cos(std::numbers::pi * edge / ramp));
}

void ChirpPulse::validate() const {
  require(std::isfinite(f_start) && f_start > 0, "pulse.f_start must be > 0");
  require(std::isfinite(f_stop) && f_stop > 0, "pulse.f_stop must be > 0");
  require(std::isfinite(duration) && duration > 0, "pulse.duration must be > 0");
  require(std::isfinite(amplitude) && amplitude >= 0, "pulse.amplitude must be >= 0");
  require(std::isfinite(ramp) && ramp >= 0, "pulse.ramp must be >= 0");
  require(envelope == Envelope::rectangular || 2 * ramp <= duration,
          "pulse.ramp must not exceed half the duration");
}

ChirpPulse with_rate(const ChirpPulse& window, double rate) {
  if (!(rate > 0)) throw ConfigError("chirp rate must be > 0");
  if (!window.is_chirped()) throw ConfigError("chirp window needs f_start != f_stop");
  ChirpPulse p = window;
  p.duration = std::abs(window.f_stop - window.f_start) / rate;
  return p;
}

}  // namespace autores
