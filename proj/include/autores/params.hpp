#pragma once

#include <numbers>

namespace autores {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Units: frequencies and rates in GHz (ordinary, not angular), times in ns.
// Angular conversion happens only inside the integrators.

/// Physical constants of the coupled cavity/transmon system plus dissipation.
struct SystemParams {
  double cavity_freq = 5.3445;  ///< omega_r / 2pi
  double kerr = -6.0e-5;        ///< K / 2pi, negative softens
  double ej = 100.0;
  double ec = 0.28;
  double g01 = 0.118;       ///< qubit-cavity coupling g / 2pi
  double detuning = 0.0;    ///< qubit 0->1 frequency minus cavity frequency
  int n_levels = 7;         ///< transmon levels retained
  int n_photons = 10;       ///< cavity Fock truncation
  double kappa = 5.3445 / 9000.0;
  double gamma1 = 1.0 / (kTwoPi * 1000.0);

  double qubit_freq() const { return cavity_freq + detuning; }
  int dim() const { return n_levels * n_photons; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Device values: Q = 9000, T1 = 1 us, E_J = 100 GHz, E_C = 280 MHz.
SystemParams device_params();

double kappa_from_quality(double freq, double quality);
double gamma1_from_t1(double t1_ns);
double t1_from_gamma1(double gamma1);

enum class Envelope { rectangular, raised_cosine };

/// Linearly chirped drive. f(t) = f_start + (f_stop - f_start) t / duration.
struct ChirpPulse {
  double f_start = 5.54;
  double f_stop = 5.14;
  double duration = 500.0;
  double amplitude = 0.0;  ///< GHz, multiplies (a + a^dag) / 2 in the rotating frame
  Envelope envelope = Envelope::rectangular;
  double ramp = 0.0;  ///< raised-cosine edge length, ns

  double frequency(double t) const { return f_start + (f_stop - f_start) * t / duration; }
  double rate() const { return (f_stop - f_start) / duration; }
  double envelope_at(double t) const;
  bool is_chirped() const { return f_start != f_stop; }

  void validate() const;
};

/// Same frequency window, duration chosen to realize |rate| in GHz/ns.
ChirpPulse with_rate(const ChirpPulse& window, double rate);

}  // namespace autores
