#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "autores/params.hpp"
#include "autores/rng.hpp"

namespace autores {

/// Cavity and qubit-oscillator amplitudes; |alpha|^2 counts quanta.
struct ClassicalState {
  std::complex<double> alpha_c{};
  std::complex<double> alpha_q{};
  double time = 0;
};

/// Classical two-mode counterpart of the Hamiltonian, GHz.
struct OscillatorPair {
  double omega_c = 0;
  double kerr = 0;
  double omega_q = 0;
  double duffing = 0;  ///< -E_C / 2, mirrors the transmon anharmonicity
  double g = 0;
  double kappa = 0;
  double gamma = 0;

  static OscillatorPair from(const SystemParams& p);
};

struct IntegrationOptions {
  double sample_dt = 1.0;  ///< ns
  double rtol = 1e-8;
  double atol = 1e-8;
  double max_dt = 0.5;  ///< ns
  double divergence = 1e4;
};

/// Integrates the coupled amplitude equations in the frame rotating at the
/// instantaneous drive frequency. Returns samples on the sample_dt grid plus
/// the final time. Throws NumericalError when |alpha| exceeds the divergence guard.
std::vector<ClassicalState> integrate_coupled(const SystemParams& p, const ChirpPulse& pulse,
                                              const ClassicalState& init, const IntegrationOptions& opts = {});

/// Vacuum Wigner draw: every quadrature is Gaussian with variance 1/4.
ClassicalState sample_vacuum(RngStream& rng);
ClassicalState sample_vacuum(std::uint64_t seed);

enum class InitialNoise { vacuum, none };

struct CaptureSettings {
  InitialNoise noise = InitialNoise::vacuum;
  /// 1 adds one quantum with random phase to the qubit oscillator (classical
  /// proxy for the excited state).
  int qubit_init = 0;
  double cut_fraction = 0.5;  ///< of the locked-orbit photon number at f_stop
  IntegrationOptions integ;
};

struct CaptureResult {
  bool captured = false;
  double final_n = 0;
  std::optional<double> capture_time;  ///< ns, set iff captured
  std::uint64_t seed = 0;
};

ClassicalState capture_initial_state(const CaptureSettings& s, std::uint64_t seed);

/// One chirped run from a sampled initial state; captured when the final
/// cavity photon number exceeds the cut. capture_time is the first sample
/// after which the photon number stays above the cut.
CaptureResult ar_capture(const SystemParams& p, const ChirpPulse& pulse, std::uint64_t seed,
                         const CaptureSettings& s = {});

/// Photon numbers at which the classical backbone is sampled.
inline constexpr double kBackboneMaxPhotons = 0.1;

/// Frequency pull per cavity quantum of the free (undriven, undamped) coupled
/// normal mode with mostly cavity character, in the lambda convention:
/// omega(n) = omega(0) - 2 lambda n.
double classical_nonlinearity(const SystemParams& p);

/// Noiseless-start capture threshold: bisection in amplitude to rel_tol.
double deterministic_threshold(const SystemParams& p, const ChirpPulse& pulse, int qubit_init = 0,
                               double rel_tol = 1e-3, const IntegrationOptions& integ = {});

struct ThresholdPoint {
  double rate = 0;  ///< GHz/ns
  double v_c = 0;   ///< GHz
};

struct ThresholdScaling {
  std::vector<ThresholdPoint> points;
  double exponent = 0;  ///< slope of log V_c vs log rate
  double exponent_stderr = 0;
};

/// Deterministic thresholds over chirp rates, keeping the frequency window of
/// `window` and adjusting its duration. Needs >= 4 rates spanning a decade.
ThresholdScaling classical_threshold(const SystemParams& p, const ChirpPulse& window,
                                     const std::vector<double>& rates, int jobs = 1,
                                     const IntegrationOptions& integ = {});

}  // namespace autores
