#include "autores/semiclassical.hpp"

#include <Eigen/Dense>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "autores/error.hpp"
#include "autores/parallel.hpp"

namespace autores {

namespace ode = boost::numeric::odeint;
using cd = std::complex<double>;
using Amplitudes = std::array<cd, 2>;

OscillatorPair OscillatorPair::from(const SystemParams& p) {
  p.validate();
  return {p.cavity_freq, p.kerr, p.qubit_freq(), -0.5 * p.ec, p.g01, p.kappa, p.gamma1};
}

namespace {

struct CoupledRhs {
  OscillatorPair m;
  const ChirpPulse& pulse;

  void operator()(const Amplitudes& x, Amplitudes& dxdt, double t) const {
    const double f = pulse.frequency(t);
    const double drive = 0.5 * pulse.amplitude * pulse.envelope_at(t);
    const cd c = x[0], q = x[1];
    const cd mi(0.0, -kTwoPi);
    dxdt[0] = mi * ((m.omega_c - f + 2.0 * m.kerr * std::norm(c)) * c + m.g * q + drive) -
              std::numbers::pi * m.kappa * c;
    dxdt[1] = mi * ((m.omega_q - f + 2.0 * m.duffing * std::norm(q)) * q + m.g * c) -
              std::numbers::pi * m.gamma * q;
  }
};

}  // namespace

std::vector<ClassicalState> integrate_coupled(const SystemParams& p, const ChirpPulse& pulse,
                                              const ClassicalState& init, const IntegrationOptions& opts) {
  pulse.validate();
  if (!(opts.sample_dt > 0)) throw ConfigError("sample_dt must be > 0");
  CoupledRhs rhs{OscillatorPair::from(p), pulse};

  std::vector<double> times;
  for (double t = init.time; t < pulse.duration - 1e-9 * opts.sample_dt;
       t = init.time + times.size() * opts.sample_dt)
    times.push_back(t);
  times.push_back(pulse.duration);

  std::vector<ClassicalState> out;
  out.reserve(times.size());
  Amplitudes x{init.alpha_c, init.alpha_q};
  auto observe = [&](const Amplitudes& s, double t) {
    if (!(std::abs(s[0]) < opts.divergence && std::abs(s[1]) < opts.divergence)) {
      std::ostringstream os;
      os << "classical amplitudes diverged (|alpha| > " << opts.divergence << ") at t = " << t << " ns";
      throw NumericalError(os.str());
    }
    out.push_back({s[0], s[1], t});
  };
  auto stepper = ode::make_dense_output(opts.atol, opts.rtol, opts.max_dt, ode::runge_kutta_dopri5<Amplitudes>());
  try {
    ode::integrate_times(stepper, rhs, x, times.begin(), times.end(), std::min(0.01, opts.max_dt), observe);
  } catch (const ode::step_adjustment_error& e) {
    throw NumericalError(std::string("classical integration: step-size underflow (") + e.what() + ")");
  }
  return out;
}

ClassicalState sample_vacuum(RngStream& rng) {
  ClassicalState s;
  const double r0 = 0.5 * rng.normal(), i0 = 0.5 * rng.normal();
  const double r1 = 0.5 * rng.normal(), i1 = 0.5 * rng.normal();
  s.alpha_c = {r0, i0};
  s.alpha_q = {r1, i1};
  return s;
}

ClassicalState sample_vacuum(std::uint64_t seed) {
  RngStream rng(seed);
  return sample_vacuum(rng);
}

ClassicalState capture_initial_state(const CaptureSettings& s, std::uint64_t seed) {
  if (s.qubit_init != 0 && s.qubit_init != 1) throw ConfigError("qubit_init must be 0 or 1");
  RngStream rng(seed);
  ClassicalState init;
  double phase = 0.0;
  if (s.noise == InitialNoise::vacuum) {
    init = sample_vacuum(rng);
    phase = kTwoPi * rng.uniform();
  }
  if (s.qubit_init == 1) init.alpha_q += std::polar(1.0, phase);
  return init;
}

CaptureResult ar_capture(const SystemParams& p, const ChirpPulse& pulse, std::uint64_t seed,
                         const CaptureSettings& s) {
  if (!(s.cut_fraction > 0 && s.cut_fraction < 1)) throw ConfigError("cut_fraction must be in (0, 1)");
  const double n_ar = (pulse.f_stop - p.cavity_freq) / (2.0 * p.kerr);
  if (!(n_ar > 0)) {
    throw ConfigError("pulse.f_stop is on the wrong side of the cavity for the Kerr sign; no locked orbit");
  }
  const double cut = s.cut_fraction * n_ar;
  const auto series = integrate_coupled(p, pulse, capture_initial_state(s, seed), s.integ);
  CaptureResult r;
  r.seed = seed;
  r.final_n = std::norm(series.back().alpha_c);
  r.captured = r.final_n > cut;
  if (r.captured) {
    std::size_t first = series.size() - 1;
    while (first > 0 && std::norm(series[first - 1].alpha_c) > cut) --first;
    r.capture_time = series[first].time;
  }
  return r;
}

namespace {

// Residual of the stationary equations along the backbone: with c real fixed,
// q follows from the cavity equation; the qubit equation must vanish.
double backbone_residual(const OscillatorPair& m, double c, double w) {
  const double n = c * c;
  const double q = -(m.omega_c - w + 2.0 * m.kerr * n) * c / m.g;
  return (m.omega_q - w + 2.0 * m.duffing * q * q) * q + m.g * c;
}

}  // namespace

double classical_nonlinearity(const SystemParams& p) {
  const OscillatorPair m = OscillatorPair::from(p);
  const std::array<double, 5> photons{0.0, 0.025, 0.05, 0.075, kBackboneMaxPhotons};
  std::array<double, 5> freqs{};
  if (m.g == 0.0) {
    for (std::size_t k = 0; k < photons.size(); ++k) freqs[k] = m.omega_c + 2.0 * m.kerr * photons[k];
  } else {
    if (m.omega_q == m.omega_c) throw ConfigError("classical nonlinearity needs a nonzero detuning");
    // Linear normal mode with mostly cavity character.
    const double mean = 0.5 * (m.omega_c + m.omega_q), half = 0.5 * (m.omega_q - m.omega_c);
    const double split = std::sqrt(half * half + m.g * m.g);
    double w = m.omega_q > m.omega_c ? mean - split : mean + split;
    for (std::size_t k = 0; k < photons.size(); ++k) {
      // At n = 0 the residual is identically zero; use the linear mode instead.
      if (photons[k] == 0.0) {
        freqs[k] = w;
        continue;
      }
      const double c = std::sqrt(photons[k]);
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const double h = 1e-7 * std::max(1.0, std::abs(w));
        const double f0 = backbone_residual(m, c, w);
        const double df = (backbone_residual(m, c, w + h) - backbone_residual(m, c, w - h)) / (2 * h);
        if (df == 0.0 || !std::isfinite(df)) break;
        const double step = f0 / df;
        w -= step;
        if (std::abs(step) < 1e-14 * std::abs(w)) {
          ok = true;
          break;
        }
      }
      if (!ok || !std::isfinite(w)) {
        throw NumericalError("classical nonlinearity: backbone Newton iteration failed at n = " +
                             std::to_string(photons[k]));
      }
      freqs[k] = w;
    }
  }
  Eigen::MatrixXd a(photons.size(), 2);
  Eigen::VectorXd b(photons.size());
  for (std::size_t k = 0; k < photons.size(); ++k) {
    a(k, 0) = 1.0;
    a(k, 1) = photons[k];
    b(k) = freqs[k];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  if (!coef.allFinite()) throw NumericalError("classical nonlinearity: linear fit failed");
  return -0.5 * coef(1);
}

double deterministic_threshold(const SystemParams& p, const ChirpPulse& pulse, int qubit_init, double rel_tol,
                               const IntegrationOptions& integ) {
  CaptureSettings s;
  s.noise = InitialNoise::none;
  s.qubit_init = qubit_init;
  s.integ = integ;
  auto captured = [&](double amp) {
    ChirpPulse q = pulse;
    q.amplitude = amp;
    return ar_capture(p, q, 0, s).captured;
  };
  double lo = 0.0, hi = pulse.amplitude > 0 ? pulse.amplitude : 0.05;
  int expand = 0;
  while (!captured(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++expand > 20) throw NumericalError("threshold bisection: no capture up to amplitude " + std::to_string(hi));
  }
  if (lo == 0.0 && captured(0.0)) throw NumericalError("threshold bisection: captured at zero amplitude");
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (captured(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

ThresholdScaling classical_threshold(const SystemParams& p, const ChirpPulse& window, const std::vector<double>& rates,
                                     int jobs, const IntegrationOptions& integ) {
  if (rates.size() < 4) throw ConfigError("threshold scaling needs at least 4 chirp rates");
  double rmin = rates.front(), rmax = rates.front();
  for (double r : rates) {
    if (!(r > 0)) throw ConfigError("chirp rates must be > 0");
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (rmax < 10.0 * rmin * (1 - 1e-12)) throw ConfigError("chirp rates must span at least one decade");

  ThresholdScaling out;
  out.points.resize(rates.size());
  parallel_for(rates.size(), jobs, [&](std::size_t k) {
    ChirpPulse pulse = with_rate(window, rates[k]);
    pulse.amplitude = 0;
    out.points[k] = {rates[k], deterministic_threshold(p, pulse, 0, 1e-3, integ)};
  });

  const auto n = static_cast<Eigen::Index>(rates.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a(k, 0) = 1.0;
    a(k, 1) = std::log(out.points[k].rate);
    b(k) = std::log(out.points[k].v_c);
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const double rss = (a * coef - b).squaredNorm();
  const Eigen::Matrix2d cov = (a.transpose() * a).inverse() * (n > 2 ? rss / double(n - 2) : 0.0);
  out.exponent = coef(1);
  out.exponent_stderr = std::sqrt(cov(1, 1));
  return out;
}

}  // namespace autores
