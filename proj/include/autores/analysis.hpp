#pragma once

#include <optional>
#include <string>
#include <vector>

#include "autores/params.hpp"

namespace autores {

/// Capture probability versus drive amplitude for one qubit state.
struct SCurve {
  std::vector<double> amplitudes;  ///< GHz, ascending
  std::vector<double> probs;
  std::vector<double> stderrs;
  std::vector<int> captured;  ///< successes per point
  std::vector<int> trials;    ///< valid runs per point
  std::vector<double> median_capture_time;  ///< ns, NaN where nothing captured
  int qubit_init = 0;
  double detuning = 0;

  std::size_t size() const { return amplitudes.size(); }
  /// Throws ConfigError on length mismatch, unsorted amplitudes or bad counts.
  void validate() const;
  /// Builds probs/stderrs from counts.
  static SCurve from_counts(std::vector<double> amplitudes, std::vector<int> captured, std::vector<int> trials,
                            int qubit_init = 0, double detuning = 0);
};

struct ThresholdResult {
  double v_half = 0;
  double width = 0;  ///< 10-90% span, ln(81) times the logistic scale
  double fit_residual = 0;  ///< RMS of P - model over the grid
  double v_half_err = 0;
  double width_err = 0;
  bool width_at_floor = false;  ///< the data are sharper than the grid resolves
};

/// Binomial maximum-likelihood logistic fit P(V) = 1 / (1 + exp(-(V - v_half) / w)).
/// The scale w is floored at (smallest grid spacing) / ln(81), so a perfect
/// step reports the grid resolution as its width. Throws NumericalError when
/// the curve does not reach below 0.1 and above 0.9.
ThresholdResult fit_threshold(const SCurve& curve);

struct FidelityReport {
  double f_raw = 0;
  double v_opt = 0;
  double f_t1_corrected = 0;
  double capture_time_used = 0;  ///< ns
  double survival = 1;           ///< exp(-t / T1)
};

/// Maximum separation of two S-curves on a common grid, with the excited-state
/// curve back-corrected for decay during the capture time. When t_capture is
/// not given, the median capture time at v_opt of the curve that latches more
/// often is used.
FidelityReport fidelity(const SCurve& s0, const SCurve& s1, double t1_ns,
                        std::optional<double> t_capture = std::nullopt);

/// Off-resonant photon number from a pump detuned by delta (GHz) from the
/// cavity: (amp/2)^2 / (delta^2 + (kappa/2)^2). Requires |delta| > 5 kappa
/// unless allow_near_resonant, and the dispersive regime |Delta| >= 2 g.
double stark_calibration(const SystemParams& p, double pump_detuning, double pump_amp,
                         bool allow_near_resonant = false);

/// Shift of the qubit transition per the calibrated photon number, using the
/// qubit-state-dependent cavity pulls: (chi_1 - chi_0) * nbar.
double qubit_stark_shift(const SystemParams& p, double nbar);

/// One detuning point of a threshold map.
struct ThresholdMapRow {
  double detuning = 0;
  int qubit_init = 0;
  std::optional<ThresholdResult> result;
  std::string error;  ///< set when the point failed
  bool near_crossing = false;
  double scale = 0;  ///< amplitude unit used for the grid at this point
};

/// Median ignoring NaN; NaN when empty.
double nan_median(std::vector<double> values);

}  // namespace autores
