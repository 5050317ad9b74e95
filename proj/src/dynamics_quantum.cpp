#include "autores/dynamics_quantum.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

#include "autores/error.hpp"
#include "autores/parallel.hpp"
#include "autores/rng.hpp"

namespace autores {

namespace ode = boost::numeric::odeint;
using cd = std::complex<double>;

namespace {

SparseOperator sparse(const OperatorMatrix& m) { return m.sparseView(0.0, 0.0); }

Eigen::Map<const Eigen::VectorXcd> view(const StateVector& v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

double norm2(const StateVector& v) { return view(v).squaredNorm(); }

}  // namespace

QuantumSystem::QuantumSystem(const SystemParams& p) : params_(p) {
  p.validate();
  const cd i(0.0, 1.0);
  const OperatorMatrix h = build_hamiltonian(p, Coupling::rwa);
  h_ = sparse(h);
  a_ = sparse(cavity_annihilation(p));
  OperatorMatrix decay = OperatorMatrix::Zero(p.dim(), p.dim());
  for (const auto& c : collapse_operators(p)) {
    collapse_.push_back(sparse(c.op));
    decay += c.op.adjoint() * c.op;
  }
  m0_ = sparse(-i * kTwoPi * h - 0.5 * decay);
  drive_ = sparse(-i * kTwoPi * 0.5 * drive_operator(p));
  excitations_.resize(p.dim());
  photons_.resize(p.dim());
  for (int k = 0; k < p.dim(); ++k) {
    const auto l = basis_label(p, k);
    excitations_(k) = l.excitations();
    photons_(k) = l.n;
  }
}

void QuantumSystem::derivative(const StateVector& psi, StateVector& dpsi, double freq, double amp) const {
  auto x = view(psi);
  Eigen::Map<Eigen::VectorXcd> dx(dpsi.data(), static_cast<Eigen::Index>(dpsi.size()));
  dx.noalias() = m0_ * x;
  if (amp != 0.0) dx.noalias() += amp * (drive_ * x);
  const cd rot(0.0, kTwoPi * freq);
  dx += rot * (excitations_.cast<cd>().cwiseProduct(x));
}

double QuantumSystem::mean_photons(const StateVector& psi) const {
  return photons_.dot(view(psi).cwiseAbs2()) / norm2(psi);
}

cd QuantumSystem::field(const StateVector& psi) const {
  auto x = view(psi);
  return x.dot(a_ * x) / x.squaredNorm();
}

double QuantumSystem::excited_population(const StateVector& psi) const {
  const int nc = params_.n_photons;
  double s = 0;
  for (std::size_t k = nc; k < psi.size(); ++k) s += std::norm(psi[k]);
  return s / norm2(psi);
}

double QuantumSystem::top_fock_population(const StateVector& psi) const {
  const int nc = params_.n_photons;
  double s = 0;
  for (int q = 0; q < params_.n_levels; ++q) s += std::norm(psi[q * nc + nc - 1]);
  return s / norm2(psi);
}

StateVector initial_state(const SystemParams& p, int qubit_init) {
  if (qubit_init != 0 && qubit_init != 1) throw ConfigError("initial qubit state must be 0 or 1");
  StateVector psi(p.dim(), cd(0.0));
  psi[basis_index(p, {qubit_init, 0})] = 1.0;
  return psi;
}

namespace {

class TrajectoryRunner {
 public:
  TrajectoryRunner(const QuantumSystem& sys, const ChirpPulse& pulse, const TrajectoryOptions& opts)
      : sys_(sys), pulse_(pulse), opts_(opts) {}

  void operator()(const StateVector& x, StateVector& dxdt, double t) const {
    sys_.derivative(x, dxdt, pulse_.frequency(t), pulse_.amplitude * pulse_.envelope_at(t));
  }

 private:
  const QuantumSystem& sys_;
  const ChirpPulse& pulse_;
  const TrajectoryOptions& opts_;
};

std::vector<double> sample_times(double duration, double dt) {
  std::vector<double> t;
  const auto n = static_cast<std::size_t>(std::floor(duration / dt + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) t.push_back(std::min(k * dt, duration));
  if (duration - t.back() > 1e-9 * dt) t.push_back(duration);
  return t;
}

}  // namespace

TrajectoryRecord evolve_trajectory(const QuantumSystem& sys, const ChirpPulse& pulse, int qubit_init,
                                   std::uint64_t seed, const TrajectoryOptions& opts) {
  pulse.validate();
  if (!(opts.sample_dt > 0)) throw ConfigError("sample_dt must be > 0");
  RngStream rng(seed);
  TrajectoryRecord rec;
  rec.seed = seed;
  const auto times = sample_times(pulse.duration, opts.sample_dt);
  rec.times = times;
  rec.mean_n.reserve(times.size());
  rec.field_mag.reserve(times.size());
  rec.qubit_pop.reserve(times.size());

  StateVector psi = initial_state(sys.params(), qubit_init);
  auto record = [&](const StateVector& x, double t) {
    const double top = sys.top_fock_population(x);
    if (top > opts.fock_guard) {
      std::ostringstream os;
      os << "trajectory seed " << seed << ": top Fock level population " << top << " at t = " << t
         << " ns exceeds " << opts.fock_guard << "; max Fock level " << sys.params().n_photons - 1
         << " reached, increase n_photons";
      throw NumericalError(os.str());
    }
    rec.mean_n.push_back(sys.mean_photons(x));
    rec.field_mag.push_back(std::abs(sys.field(x)));
    rec.qubit_pop.push_back(sys.excited_population(x));
  };

  TrajectoryRunner rhs(sys, pulse, opts);
  auto stepper = ode::make_dense_output(opts.atol, opts.rtol, opts.max_dt, ode::runge_kutta_dopri5<StateVector>());
  StateVector scratch(psi.size());
  double threshold = rng.uniform();
  double t = 0.0;
  std::size_t next_sample = 0;
  double dt_guess = std::min(0.01, opts.max_dt);
  stepper.initialize(psi, t, dt_guess);
  record(psi, 0.0);
  ++next_sample;

  const double end = pulse.duration;
  while (next_sample < times.size()) {
    std::pair<double, double> span;
    try {
      span = stepper.do_step(rhs);
    } catch (const ode::step_adjustment_error& e) {
      throw NumericalError("trajectory seed " + std::to_string(seed) + ": step-size underflow (" + e.what() + ")");
    }
    const auto [t0, t1] = span;
    if (!(t1 > t0) || t1 - t0 < 1e-12) {
      throw NumericalError("trajectory seed " + std::to_string(seed) + ": step-size underflow at t = " +
                           std::to_string(t0));
    }
    double jump_time = std::numeric_limits<double>::infinity();
    if (norm2(stepper.current_state()) <= threshold) {
      double lo = t0, hi = t1;
      for (int it = 0; it < 100 && hi - lo > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        stepper.calc_state(mid, scratch);
        (norm2(scratch) > threshold ? lo : hi) = mid;
      }
      jump_time = hi;
    }
    const double upto = std::min({t1, jump_time, end});
    while (next_sample < times.size() && times[next_sample] <= upto) {
      stepper.calc_state(times[next_sample], scratch);
      record(scratch, times[next_sample]);
      if (++next_sample == times.size()) rec.final_state = scratch;
    }
    if (jump_time <= end && jump_time <= t1) {
      stepper.calc_state(jump_time, scratch);
      const auto x = view(scratch);
      std::vector<double> weights;
      double total = 0;
      for (const auto& c : sys.collapse()) {
        weights.push_back((c * x).squaredNorm());
        total += weights.back();
      }
      const double pick = rng.uniform() * total;
      int channel = 0;
      for (double acc = weights[0]; acc < pick && channel + 1 < static_cast<int>(weights.size());)
        acc += weights[++channel];
      Eigen::VectorXcd next = sys.collapse()[channel] * x;
      next /= next.norm();
      psi.assign(next.data(), next.data() + next.size());
      rec.jumps.push_back({jump_time, channel});
      threshold = rng.uniform();
      dt_guess = std::max(stepper.current_time_step(), 1e-6);
      stepper.initialize(psi, jump_time, std::min(dt_guess, opts.max_dt));
    }
  }
  const double norm = std::sqrt(norm2(rec.final_state));
  for (auto& z : rec.final_state) z /= norm;
  return rec;
}

TrajectoryRecord evolve_trajectory(const SystemParams& p, const ChirpPulse& pulse, int qubit_init,
                                   std::uint64_t seed, const TrajectoryOptions& opts) {
  return evolve_trajectory(QuantumSystem(p), pulse, qubit_init, seed, opts);
}

double locked_orbit_photons(const SystemParams& p, double freq) {
  if (p.kerr == 0.0) throw ConfigError("locked-orbit photon number needs a nonzero Kerr coefficient");
  const double n = (freq - p.cavity_freq) / (2.0 * p.kerr);
  if (!(n > 0)) {
    throw ConfigError("drive frequency " + std::to_string(freq) +
                      " GHz is on the wrong side of the cavity for the Kerr sign; no locked orbit");
  }
  return n;
}

CaptureEstimate capture_probability_quantum(const SystemParams& p, const ChirpPulse& pulse, int qubit_init,
                                            int n_traj, std::uint64_t seed0, const TrajectoryOptions& opts,
                                            int jobs, double cut_fraction) {
  if (n_traj < 1) throw ConfigError("n_traj must be >= 1");
  const double cut = cut_fraction * locked_orbit_photons(p, pulse.f_stop);
  const QuantumSystem sys(p);
  CaptureEstimate est;
  est.n_traj = n_traj;
  est.final_n.assign(n_traj, std::nan(""));
  est.capture_times.assign(n_traj, std::nan(""));
  std::vector<int> aborted(n_traj, 0);
  parallel_for(n_traj, jobs, [&](std::size_t k) {
    try {
      const auto rec = evolve_trajectory(sys, pulse, qubit_init, stream_seed(seed0, k), opts);
      est.final_n[k] = rec.mean_n.back();
      if (rec.mean_n.back() > cut) {
        std::size_t first = rec.mean_n.size() - 1;
        while (first > 0 && rec.mean_n[first - 1] > cut) --first;
        est.capture_times[k] = rec.times[first];
      }
    } catch (const NumericalError&) {
      aborted[k] = 1;
    }
  });
  int captured = 0;
  for (int k = 0; k < n_traj; ++k) {
    est.n_aborted += aborted[k];
    if (!aborted[k] && est.final_n[k] > cut) ++captured;
  }
  if (est.n_aborted * 100 > n_traj) {
    throw NumericalError(std::to_string(est.n_aborted) + " of " + std::to_string(n_traj) +
                         " trajectories aborted (limit 1%); increase n_photons");
  }
  const int valid = n_traj - est.n_aborted;
  est.probability = valid > 0 ? static_cast<double>(captured) / valid : 0.0;
  est.std_error = valid > 0 ? std::sqrt(est.probability * (1 - est.probability) / valid) : 0.0;
  return est;
}

double linear_drive_photons(double kappa, double delta, double amp) {
  return 0.25 * amp * amp / (delta * delta + 0.25 * kappa * kappa);
}

double linear_drive_amplitude(double kappa, double delta, double nbar) {
  if (nbar < 0) throw ConfigError("pump photon number must be >= 0");
  return 2.0 * std::sqrt(nbar * (delta * delta + 0.25 * kappa * kappa));
}

namespace {

// Column-stacked Liouvillian: vec(A X B) = (B^T (x) A) vec(X).
SparseOperator liouvillian(const SparseOperator& h_ang, const std::vector<SparseOperator>& collapse, int dim) {
  SparseOperator id(dim, dim);
  id.setIdentity();
  const cd i(0.0, 1.0);
  SparseOperator ht = h_ang.transpose();
  SparseOperator l = -i * (Eigen::kroneckerProduct(id, h_ang).eval() - Eigen::kroneckerProduct(ht, id).eval());
  for (const auto& c : collapse) {
    SparseOperator cdc = c.adjoint() * c;
    SparseOperator cdct = cdc.transpose();
    SparseOperator cconj = c.conjugate();
    l += Eigen::kroneckerProduct(cconj, c).eval();
    l -= 0.5 * Eigen::kroneckerProduct(id, cdc).eval();
    l -= 0.5 * Eigen::kroneckerProduct(cdct, id).eval();
  }
  l.makeCompressed();
  return l;
}

class ProbeResponse {
 public:
  ProbeResponse(const SystemParams& p, double pump_freq, double pump_nbar) : p_(p), pump_freq_(pump_freq) {
    p.validate();
    const int d = p.dim();
    dim_ = d;
    const double pump_amp = linear_drive_amplitude(p.kappa, pump_freq - p.cavity_freq, pump_nbar);
    OperatorMatrix h = build_hamiltonian(p, Coupling::rwa) - pump_freq * excitation_number(p) +
                       0.5 * pump_amp * drive_operator(p);
    std::vector<SparseOperator> collapse;
    for (const auto& c : collapse_operators(p)) collapse.push_back(sparse(c.op));
    l_ = liouvillian(sparse(kTwoPi * h), collapse, d);
    a_ = sparse(cavity_annihilation(p));

    // Steady state: replace the first equation by the trace condition.
    std::vector<Eigen::Triplet<cd>> trip;
    for (int k = 0; k < l_.outerSize(); ++k)
      for (SparseOperator::InnerIterator it(l_, k); it; ++it)
        if (it.row() != 0) trip.emplace_back(it.row(), it.col(), it.value());
    for (int j = 0; j < d; ++j) trip.emplace_back(0, j * d + j, 1.0);
    SparseOperator m(d * d, d * d);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    Eigen::SparseLU<SparseOperator> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) throw NumericalError("steady state: factorization failed");
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(d * d);
    rhs(0) = 1.0;
    Eigen::VectorXcd x = lu.solve(rhs);
    rho_ = Eigen::Map<Eigen::MatrixXcd>(x.data(), d, d);
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();

    const int nc = p.n_photons;
    double top = 0, n = 0;
    for (int q = 0; q < p.n_levels; ++q)
      for (int k = 0; k < nc; ++k) {
        const double pop = rho_(q * nc + k, q * nc + k).real();
        n += k * pop;
        if (k == nc - 1) top += pop;
      }
    if (top > 1e-4) {
      throw NumericalError("steady state: top Fock population " + std::to_string(top) +
                           " exceeds 1e-4; increase n_photons");
    }
    photons_ = n;

    OperatorMatrix ad = cavity_annihilation(p).adjoint();
    OperatorMatrix comm = ad * rho_ - rho_ * ad;
    source_ = Eigen::Map<Eigen::VectorXcd>(comm.data(), d * d);

    id_.resize(d * d, d * d);
    id_.setIdentity();
    SparseOperator probe_matrix = l_ + cd(0.0, 1.0) * id_;
    lu_.analyzePattern(probe_matrix);
  }

  double photons() const { return photons_; }

  // |<a>| at the probe frequency for unit probe amplitude, plus a convergence flag.
  std::pair<double, bool> operator()(double probe_freq, double probe_amp) {
    const double delta = kTwoPi * (probe_freq - pump_freq_);
    SparseOperator m = l_ + cd(0.0, delta) * id_;
    lu_.factorize(m);
    if (lu_.info() != Eigen::Success) return {std::nan(""), false};
    Eigen::VectorXcd b = cd(0.0, std::numbers::pi * probe_amp) * source_;
    Eigen::VectorXcd x = lu_.solve(b);
    const double resid = (m * x - b).norm() / std::max(b.norm(), 1e-300);
    const Eigen::Map<Eigen::MatrixXcd> rho1(x.data(), dim_, dim_);
    // Tr(a rho1) = sum_{ij} a_ij rho1_ji
    cd tr = 0;
    for (int k = 0; k < a_.outerSize(); ++k)
      for (SparseOperator::InnerIterator it(a_, k); it; ++it) tr += it.value() * rho1(it.col(), it.row());
    return {std::abs(tr), resid < 1e-8};
  }

 private:
  SystemParams p_;
  double pump_freq_;
  int dim_ = 0;
  SparseOperator l_, a_, id_;
  Eigen::MatrixXcd rho_;
  Eigen::VectorXcd source_;
  Eigen::SparseLU<SparseOperator> lu_;
  double photons_ = 0;
};

}  // namespace

TransmissionScan steady_transmission(const SystemParams& p, std::span<const double> probe_freqs, double probe_amp,
                                     double pump_freq, double pump_nbar) {
  if (!(probe_amp > 0)) throw ConfigError("probe amplitude must be > 0");
  ProbeResponse response(p, pump_freq, pump_nbar);
  TransmissionScan scan;
  scan.pump_photons = response.photons();
  for (double f : probe_freqs) {
    auto [mag, ok] = response(f, probe_amp);
    scan.points.push_back({f, mag, ok});
  }
  return scan;
}

double resonance_frequency(const SystemParams& p, std::span<const double> coarse, double probe_amp,
                           double pump_freq, double pump_nbar, double* pump_photons) {
  if (coarse.size() < 3) throw ConfigError("resonance search needs at least three coarse frequencies");
  ProbeResponse response(p, pump_freq, pump_nbar);
  if (pump_photons) *pump_photons = response.photons();
  std::size_t best = 0;
  double best_mag = -1;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    const double m = response(coarse[k], probe_amp).first;
    if (m > best_mag) {
      best_mag = m;
      best = k;
    }
  }
  if (best == 0 || best + 1 == coarse.size()) {
    throw NumericalError("resonance search: maximum at the edge of the probe window");
  }
  auto neg = [&](double f) { return -response(f, probe_amp).first; };
  auto [f, val] = boost::math::tools::brent_find_minima(neg, coarse[best - 1], coarse[best + 1], 40);
  (void)val;
  return f;
}

}  // namespace autores
