#include "autores/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "autores/error.hpp"
#include "autores/spectrum.hpp"

namespace autores {

namespace {

const double kLn81 = std::log(81.0);

double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

void SCurve::validate() const {
  const std::size_t n = amplitudes.size();
  if (probs.size() != n || stderrs.size() != n || captured.size() != n || trials.size() != n ||
      median_capture_time.size() != n) {
    throw ConfigError("S-curve columns have different lengths");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && !(amplitudes[k] > amplitudes[k - 1])) throw ConfigError("S-curve amplitudes must be ascending");
    if (!(probs[k] >= 0 && probs[k] <= 1)) throw ConfigError("S-curve probability outside [0, 1]");
    if (trials[k] < 0 || captured[k] < 0 || captured[k] > trials[k]) throw ConfigError("S-curve counts inconsistent");
  }
}

SCurve SCurve::from_counts(std::vector<double> amplitudes, std::vector<int> captured, std::vector<int> trials,
                           int qubit_init, double detuning) {
  SCurve s;
  s.amplitudes = std::move(amplitudes);
  s.captured = std::move(captured);
  s.trials = std::move(trials);
  s.qubit_init = qubit_init;
  s.detuning = detuning;
  for (std::size_t k = 0; k < s.captured.size(); ++k) {
    const double n = s.trials[k];
    const double prob = n > 0 ? s.captured[k] / n : 0.0;
    s.probs.push_back(prob);
    s.stderrs.push_back(n > 0 ? std::sqrt(prob * (1 - prob) / n) : 0.0);
  }
  s.median_capture_time.assign(s.probs.size(), std::numeric_limits<double>::quiet_NaN());
  s.validate();
  return s;
}

ThresholdResult fit_threshold(const SCurve& curve) {
  curve.validate();
  const std::size_t m = curve.size();
  if (m < 3) throw NumericalError("threshold fit needs at least 3 amplitudes");
  const auto [pmin, pmax] = std::minmax_element(curve.probs.begin(), curve.probs.end());
  if (!(*pmin < 0.1 && *pmax > 0.9)) {
    std::ostringstream os;
    os << "S-curve spans P in [" << *pmin << ", " << *pmax << "], needs P < 0.1 and P > 0.9";
    throw NumericalError(os.str());
  }
  double spacing = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < m; ++k) spacing = std::min(spacing, curve.amplitudes[k] - curve.amplitudes[k - 1]);

  // Center and scale the amplitude axis so the Newton system is well conditioned.
  const double x0 = 0.5 * (curve.amplitudes.front() + curve.amplitudes.back());
  const double xs = curve.amplitudes.back() - curve.amplitudes.front();
  std::vector<double> x(m), k(m), n(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = (curve.amplitudes[i] - x0) / xs;
    n[i] = curve.trials[i];
    k[i] = curve.captured[i];
  }
  const double slope_cap = xs * kLn81 / spacing;  // 1 / w_floor in scaled units

  // P = sigmoid(b0 + b1 x); concave log-likelihood, Newton with halving.
  auto loglik = [&](double b0, double b1) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double z = b0 + b1 * x[i];
      // log sigmoid(z) = -log(1 + e^-z)
      const double lp = -std::log1p(std::exp(-std::abs(z))) + std::min(z, 0.0);
      const double lq = -std::log1p(std::exp(-std::abs(z))) + std::min(-z, 0.0);
      s += k[i] * lp + (n[i] - k[i]) * lq;
    }
    return s;
  };
  auto newton = [&](double& b0, double& b1, bool fix_slope) {
    for (int it = 0; it < 200; ++it) {
      Eigen::Vector2d grad = Eigen::Vector2d::Zero();
      Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
      for (std::size_t i = 0; i < m; ++i) {
        const double p = sigmoid(b0 + b1 * x[i]);
        const double r = k[i] - n[i] * p;
        const double w = n[i] * p * (1 - p);
        grad += Eigen::Vector2d(r, r * x[i]);
        info += w * Eigen::Vector2d(1, x[i]) * Eigen::RowVector2d(1, x[i]);
      }
      Eigen::Vector2d step;
      if (fix_slope) {
        step = {info(0, 0) > 0 ? grad(0) / info(0, 0) : 0.0, 0.0};
      } else {
        info.diagonal().array() += 1e-12;
        step = info.ldlt().solve(grad);
      }
      const double l0 = loglik(b0, b1);
      double t = 1.0;
      while (t > 1e-10 && loglik(b0 + t * step(0), b1 + t * step(1)) < l0 - 1e-12) t *= 0.5;
      b0 += t * step(0);
      b1 += t * step(1);
      if (!fix_slope && b1 > slope_cap) return false;
      if (std::abs(t * step(0)) < 1e-12 && std::abs(t * step(1)) < 1e-12 * std::max(1.0, std::abs(b1))) break;
    }
    return true;
  };

  double b0 = 0.0, b1 = 4.0;
  bool at_floor = !newton(b0, b1, false);
  if (at_floor || b1 > slope_cap) {
    at_floor = true;
    b1 = slope_cap;
    b0 = 0.0;
    // Start from the P = 1/2 crossing of the data to keep the 1-D search local.
    for (std::size_t i = 1; i < m; ++i)
      if (curve.probs[i - 1] < 0.5 && curve.probs[i] >= 0.5) b0 = -b1 * 0.5 * (x[i - 1] + x[i]);
    newton(b0, b1, true);
  }
  if (!(b1 > 0) || !std::isfinite(b0)) throw NumericalError("threshold fit: S-curve is not increasing");

  Eigen::Matrix2d info = Eigen::Matrix2d::Zero();
  double rss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = sigmoid(b0 + b1 * x[i]);
    info += n[i] * p * (1 - p) * Eigen::Vector2d(1, x[i]) * Eigen::RowVector2d(1, x[i]);
    rss += (curve.probs[i] - p) * (curve.probs[i] - p);
  }

  ThresholdResult r;
  r.v_half = x0 + xs * (-b0 / b1);
  r.width = xs * kLn81 / b1;
  r.fit_residual = std::sqrt(rss / m);
  r.width_at_floor = at_floor;
  if (at_floor) {
    r.v_half_err = info(0, 0) > 0 ? xs / b1 / std::sqrt(info(0, 0)) : 0.0;
    r.width_err = 0.0;
  } else {
    const Eigen::Matrix2d cov = info.inverse();
    Eigen::Matrix2d jac;
    jac << -1.0 / b1, b0 / (b1 * b1), 0.0, -1.0 / (b1 * b1);
    const Eigen::Matrix2d c = jac * cov * jac.transpose();
    r.v_half_err = xs * std::sqrt(std::max(c(0, 0), 0.0));
    r.width_err = xs * kLn81 * std::sqrt(std::max(c(1, 1), 0.0));
  }
  if (r.v_half < curve.amplitudes.front() || r.v_half > curve.amplitudes.back()) {
    throw NumericalError("threshold fit: P = 1/2 falls outside the sampled amplitudes");
  }
  return r;
}

double nan_median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t h = values.size() / 2;
  return values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

FidelityReport fidelity(const SCurve& s0, const SCurve& s1, double t1_ns, std::optional<double> t_capture) {
  s0.validate();
  s1.validate();
  if (s0.size() != s1.size() || s0.size() == 0) throw ConfigError("fidelity: S-curves have different grids");
  for (std::size_t k = 0; k < s0.size(); ++k) {
    const double a = s0.amplitudes[k], b = s1.amplitudes[k];
    if (std::abs(a - b) > 1e-12 * std::max(std::abs(a), std::abs(b))) {
      throw ConfigError("fidelity: S-curves have different amplitude grids");
    }
  }
  if (std::abs(s0.detuning - s1.detuning) > 1e-12) throw ConfigError("fidelity: S-curves at different detunings");
  if (!(t1_ns > 0)) throw ConfigError("fidelity: T1 must be > 0");

  FidelityReport r;
  std::size_t best = 0;
  for (std::size_t k = 0; k < s0.size(); ++k) {
    const double sep = std::abs(s1.probs[k] - s0.probs[k]);
    if (sep > r.f_raw) {
      r.f_raw = sep;
      best = k;
    }
  }
  r.v_opt = s0.amplitudes[best];
  if (t_capture) {
    r.capture_time_used = *t_capture;
  } else {
    const SCurve& latch = s1.probs[best] >= s0.probs[best] ? s1 : s0;
    const SCurve& other = &latch == &s1 ? s0 : s1;
    double t = latch.median_capture_time[best];
    if (std::isnan(t)) t = other.median_capture_time[best];
    r.capture_time_used = std::isnan(t) ? 0.0 : t;
  }
  if (r.capture_time_used < 0) throw ConfigError("fidelity: capture time must be >= 0");
  r.survival = std::exp(-r.capture_time_used / t1_ns);
  r.f_t1_corrected = std::min(1.0, r.f_raw / r.survival);
  return r;
}

double stark_calibration(const SystemParams& p, double pump_detuning, double pump_amp, bool allow_near_resonant) {
  p.validate();
  if (!(pump_amp >= 0)) throw ConfigError("pump amplitude must be >= 0");
  if (!allow_near_resonant && !(std::abs(pump_detuning) > 5.0 * p.kappa)) {
    throw ConfigError("pump detuning " + std::to_string(pump_detuning) + " GHz is within 5 kappa of the cavity");
  }
  if (std::abs(p.detuning) < 2.0 * p.g01) {
    throw ConfigError("Stark calibration needs the dispersive regime |detuning| >= 2 g01");
  }
  const double half = 0.5 * pump_amp;
  return half * half / (pump_detuning * pump_detuning + 0.25 * p.kappa * p.kappa);
}

double qubit_stark_shift(const SystemParams& p, double nbar) {
  return (dispersive_shift(p, 1) - dispersive_shift(p, 0)) * nbar;
}

}  // namespace autores
