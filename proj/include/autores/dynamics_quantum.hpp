#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "autores/model.hpp"
#include "autores/params.hpp"

namespace autores {

using SparseOperator = Eigen::SparseMatrix<std::complex<double>>;
using StateVector = std::vector<std::complex<double>>;

struct Jump {
  double time = 0;
  int channel = 0;  ///< index into collapse_operators()
};

/// One Monte Carlo wavefunction realization sampled on a fixed time grid.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> mean_n;     ///< <a^dag a>
  std::vector<double> field_mag;  ///< |<a>|
  std::vector<double> qubit_pop;  ///< population of transmon levels >= 1
  std::vector<Jump> jumps;
  std::uint64_t seed = 0;
  StateVector final_state;  ///< normalized state at the end of the pulse
};

struct TrajectoryOptions {
  double sample_dt = 1.0;   ///< ns
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_dt = 5.0;      ///< ns
  double fock_guard = 1e-4; ///< abort when the top Fock level holds more than this
};

/// Operators for the rotating-frame non-Hermitian evolution, in angular units.
/// Immutable after construction; share freely across threads.
class QuantumSystem {
 public:
  explicit QuantumSystem(const SystemParams& p);

  const SystemParams& params() const { return params_; }
  int dim() const { return params_.dim(); }

  /// d psi/dt = [M0 + i 2pi f N + A (-i 2pi (a + a^dag)/2)] psi
  void derivative(const StateVector& psi, StateVector& dpsi, double freq, double amp) const;

  const std::vector<SparseOperator>& collapse() const { return collapse_; }
  const SparseOperator& annihilation() const { return a_; }
  /// RWA Hamiltonian in GHz (no frame, no drive).
  const SparseOperator& hamiltonian() const { return h_; }
  const Eigen::VectorXd& excitations() const { return excitations_; }

  double mean_photons(const StateVector& psi) const;
  std::complex<double> field(const StateVector& psi) const;
  double excited_population(const StateVector& psi) const;
  double top_fock_population(const StateVector& psi) const;

 private:
  SystemParams params_;
  SparseOperator h_;
  SparseOperator m0_;
  SparseOperator drive_;
  SparseOperator a_;
  std::vector<SparseOperator> collapse_;
  Eigen::VectorXd excitations_;
  Eigen::VectorXd photons_;
};

/// Product state |qubit_init> (x) |0>.
StateVector initial_state(const SystemParams& p, int qubit_init);

/// MCWF evolution in the frame rotating at the instantaneous drive frequency
/// with RWA coupling. Deterministic in (system, pulse, qubit_init, seed).
/// Throws NumericalError on truncation breach or step-size underflow.
TrajectoryRecord evolve_trajectory(const QuantumSystem& sys, const ChirpPulse& pulse, int qubit_init,
                                   std::uint64_t seed, const TrajectoryOptions& opts = {});
TrajectoryRecord evolve_trajectory(const SystemParams& p, const ChirpPulse& pulse, int qubit_init,
                                   std::uint64_t seed, const TrajectoryOptions& opts = {});

/// Locked-orbit photon number of the Kerr oscillator at drive frequency f:
/// (f - cavity_freq) / (2 K). Throws ConfigError when not positive.
double locked_orbit_photons(const SystemParams& p, double freq);

struct CaptureEstimate {
  double probability = 0;
  double std_error = 0;
  int n_traj = 0;
  int n_aborted = 0;
  std::vector<double> final_n;        ///< per trajectory, NaN when aborted
  std::vector<double> capture_times;  ///< per trajectory, NaN when not captured
};

/// Fraction of trajectories whose final mean_n exceeds cut_fraction times the
/// locked-orbit value at f_stop. More than 1% aborted trajectories is an error.
CaptureEstimate capture_probability_quantum(const SystemParams& p, const ChirpPulse& pulse, int qubit_init,
                                            int n_traj, std::uint64_t seed0, const TrajectoryOptions& opts = {},
                                            int jobs = 1, double cut_fraction = 0.5);

/// Intracavity photons of a linear cavity driven off resonance:
/// (amp/2)^2 / (delta^2 + (kappa/2)^2), all in GHz.
double linear_drive_photons(double kappa, double delta, double amp);
/// Inverse of linear_drive_photons.
double linear_drive_amplitude(double kappa, double delta, double nbar);

struct TransmissionPoint {
  double freq = 0;
  double magnitude = 0;  ///< |<a>| demodulated at the probe frequency
  bool converged = true;
};

struct TransmissionScan {
  std::vector<TransmissionPoint> points;
  double pump_photons = 0;  ///< <a^dag a> in the pumped steady state
};

/// Weak-probe steady-state transmission with an off-resonant pump occupying
/// the cavity with pump_nbar photons (linear-cavity calibration). Solved in
/// the pump frame: steady state of the pumped Liouvillian, then first-order
/// response to the probe.
TransmissionScan steady_transmission(const SystemParams& p, std::span<const double> probe_freqs,
                                     double probe_amp, double pump_freq, double pump_nbar);

/// Probe frequency of maximum response, refined by Brent search around the
/// best scan point.
double resonance_frequency(const SystemParams& p, std::span<const double> coarse_freqs, double probe_amp,
                           double pump_freq, double pump_nbar, double* pump_photons = nullptr);

}  // namespace autores
