#include <doctest.h>

#include <cmath>
#include <thread>

#include "autores/dynamics_quantum.hpp"
#include "autores/parallel.hpp"
#include "autores/error.hpp"
#include "autores/rng.hpp"
#include "autores/semiclassical.hpp"
#include "autores/spectrum.hpp"
#include "oracles.hpp"

using namespace autores;

namespace {

ChirpPulse fixed_drive(double freq, double amp, double duration) {
  ChirpPulse c;
  c.f_start = c.f_stop = freq;
  c.amplitude = amp;
  c.duration = duration;
  return c;
}

TrajectoryOptions unguarded() {
  TrajectoryOptions o;
  o.fock_guard = 1.0;
  return o;
}

SystemParams oracle_system() {
  SystemParams p;
  p.n_levels = 2;
  p.n_photons = 3;
  p.kappa = 0.02;
  p.gamma1 = 0.01;
  p.detuning = -0.5;
  return p;
}

// Large Kerr so the locked orbit (10 photons) fits in a small Fock space.
SystemParams scaled_kerr() {
  SystemParams p;
  p.n_levels = 2;
  p.n_photons = 30;
  p.kerr = -0.004;
  p.detuning = -1.0;
  p.kappa = 0.002;
  return p;
}

ChirpPulse scaled_chirp(const SystemParams& p) {
  ChirpPulse c;
  c.f_start = p.cavity_freq + 0.03;
  c.f_stop = p.cavity_freq - 0.08;
  c.duration = 200;
  return c;
}

std::vector<double> span(double lo, double hi, int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(lo + (hi - lo) * k / (n - 1));
  return v;
}

}  // namespace

TEST_SUITE("dynamics_quantum") {

TEST_CASE("undriven vacuum stays empty") {
  SystemParams p;
  p.n_photons = 4;
  ChirpPulse c;
  c.duration = 100;
  const auto rec = evolve_trajectory(p, c, 0, 1);
  REQUIRE(rec.times.size() == 101);
  for (double n : rec.mean_n) CHECK(n == 0.0);
  CHECK(rec.jumps.empty());
}

TEST_CASE("trajectories are reproducible from the seed") {
  const SystemParams p = oracle_system();
  const auto c = fixed_drive(p.cavity_freq + 0.03, 0.02, 60);
  const auto a = evolve_trajectory(p, c, 0, 42, unguarded());
  const auto b = evolve_trajectory(p, c, 0, 42, unguarded());
  CHECK(a.mean_n == b.mean_n);
  CHECK(a.field_mag == b.field_mag);
  CHECK(a.jumps.size() == b.jumps.size());
  CHECK(a.final_state == b.final_state);
  const auto other = evolve_trajectory(p, c, 0, 43, unguarded());
  CHECK(other.mean_n != a.mean_n);
  double norm = 0;
  for (auto z : a.final_state) norm += std::norm(z);
  CHECK(std::abs(norm - 1.0) < 1e-8);
  for (double n : a.mean_n) CHECK((n >= 0 && n <= p.n_photons - 1));
}

TEST_CASE("excited qubit decays at 1/T1") {
  SystemParams p;
  p.n_levels = 3;
  p.n_photons = 3;
  p.g01 = 0;
  p.detuning = 0;  // nothing rotates in the frame, only the jumps matter
  const auto c = fixed_drive(p.cavity_freq, 0.0, 500);
  const QuantumSystem sys(p);
  const int n = 400;
  std::vector<double> mean(c.duration + 1, 0.0);
  std::vector<std::vector<double>> pops(n);
  parallel_for(n, static_cast<int>(std::thread::hardware_concurrency()),
               [&](std::size_t k) { pops[k] = evolve_trajectory(sys, c, 1, stream_seed(9, k)).qubit_pop; });
  for (const auto& q : pops)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += q[i] / n;
  for (int t : {100, 250, 500}) {
    const double expect = std::exp(-t / 1000.0);
    const double sigma = std::sqrt(expect * (1 - expect) / n);
    CHECK(std::abs(mean[t] - expect) < 4 * sigma + 0.005);
  }
}

TEST_CASE("rotating frame agrees with lab-frame integration") {
  SystemParams p;
  p.n_levels = 2;
  p.n_photons = 5;
  p.kappa = 1e-12;
  p.gamma1 = 0;
  p.detuning = -0.3;
  const double f = p.cavity_freq + 0.004, amp = 0.01, t = 40;
  const auto rec = evolve_trajectory(p, fixed_drive(f, amp, t), 0, 1, unguarded());
  REQUIRE(rec.jumps.empty());

  const auto h = build_hamiltonian(p, Coupling::rwa);
  Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(p.dim());
  psi0(0) = 1.0;
  const Eigen::VectorXcd lab = oracle::lab_frame_evolve(h, cavity_annihilation(p), amp, f, psi0, t, 2e-4);
  const Eigen::Map<const Eigen::VectorXcd> rot(rec.final_state.data(), p.dim());
  // lab = exp(-i 2 pi f N t) rot
  Eigen::VectorXcd back(p.dim());
  for (int k = 0; k < p.dim(); ++k)
    back(k) = std::polar(1.0, -kTwoPi * f * basis_label(p, k).excitations() * t) * rot(k);
  const double e_lab = (lab.adjoint() * h * lab)(0, 0).real();
  const double e_rot = (back.adjoint() * h * back)(0, 0).real();
  CHECK(std::abs(e_rot - e_lab) < 1e-6 * std::abs(e_lab));
  const auto nop = photon_number(p);
  const double n_lab = (lab.adjoint() * nop * lab)(0, 0).real();
  CHECK(n_lab > 0.01);
  CHECK(std::abs(rec.mean_n.back() - n_lab) < 1e-6 * n_lab);
  CHECK(std::abs(std::abs(lab.dot(back)) - 1.0) < 1e-6);
}

TEST_CASE("trajectory average reproduces the master equation") {
  const SystemParams p = oracle_system();
  const auto c = fixed_drive(p.cavity_freq + 0.03, 0.02, 100);
  const QuantumSystem sys(p);
  const int n = 300;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(p.dim(), p.dim());
  int jumps[2] = {0, 0};
  for (int k = 0; k < n; ++k) {
    const auto rec = evolve_trajectory(sys, c, 0, stream_seed(5, k), unguarded());
    const Eigen::Map<const Eigen::VectorXcd> v(rec.final_state.data(), p.dim());
    rho += v * v.adjoint() / double(n);
    for (const auto& j : rec.jumps) ++jumps[j.channel];
  }
  std::vector<Eigen::MatrixXcd> ops;
  for (const auto& ch : collapse_operators(p)) ops.push_back(ch.op);
  Eigen::MatrixXcd rho0 = Eigen::MatrixXcd::Zero(p.dim(), p.dim());
  rho0(0, 0) = 1.0;
  const auto exact = oracle::lindblad_evolve(oracle::rotating_hamiltonian(p, c.f_start, c.amplitude), ops, rho0, 100);
  CHECK(jumps[0] > 100);
  CHECK(jumps[1] > 5);
  CHECK(oracle::trace_distance(rho, exact) < 0.03);
}

TEST_CASE("truncation breach aborts with a diagnostic") {
  SystemParams p;
  p.n_levels = 2;
  p.n_photons = 4;
  p.detuning = -2.0;
  CHECK_THROWS_WITH_AS(evolve_trajectory(p, fixed_drive(p.cavity_freq, 0.2, 100), 0, 1),
                       doctest::Contains("increase n_photons"), NumericalError);
}

TEST_CASE("locked orbit") {
  SystemParams p;
  CHECK(locked_orbit_photons(p, 5.14) == doctest::Approx((5.14 - 5.3445) / (2 * -6e-5)));
  CHECK_THROWS_AS(locked_orbit_photons(p, 5.5), ConfigError);
}

TEST_CASE("quantum capture probability") {
  const SystemParams p = scaled_kerr();
  ChirpPulse c = scaled_chirp(p);
  const double vc = deterministic_threshold(p, c);

  c.amplitude = 0;
  CHECK(capture_probability_quantum(p, c, 0, 10, 1).probability == 0.0);

  c.amplitude = 3 * vc;
  const auto high = capture_probability_quantum(p, c, 0, 20, 1);
  CHECK(high.probability >= 0.9);
  CHECK(high.n_aborted == 0);

  c.amplitude = 1.2 * vc;
  const auto mid = capture_probability_quantum(p, c, 0, 40, 1);
  CHECK(mid.probability > 0.0);
  CHECK(mid.probability < 1.0);
  CHECK(mid.std_error > 0.0);
  // Outcomes split into latched and relaxed rather than piling up at the cut.
  const double n_ar = locked_orbit_photons(p, c.f_stop);
  int middle = 0;
  for (double n : mid.final_n) middle += n > 0.4 * n_ar && n < 0.6 * n_ar;
  CHECK(middle < 0.25 * mid.n_traj);

  // Same ensemble whatever the worker count.
  const auto threaded = capture_probability_quantum(p, c, 0, 40, 1, {}, 3);
  CHECK(threaded.final_n == mid.final_n);
}

TEST_CASE("linear drive calibration") {
  const double kappa = 6e-4;
  CHECK(linear_drive_photons(kappa, 0.05, 0.0) == 0.0);
  const double a = linear_drive_amplitude(kappa, -0.05, 10.0);
  CHECK(linear_drive_photons(kappa, -0.05, a) == doctest::Approx(10.0));
  CHECK(linear_drive_photons(kappa, 0.0, 0.01) == doctest::Approx(std::pow(0.01 / kappa, 2)));
}

TEST_CASE("bare cavity probe is a Lorentzian of width kappa") {
  SystemParams p;
  p.n_levels = 2;
  p.n_photons = 4;
  p.g01 = 0;
  p.kerr = 0;
  p.detuning = -1.0;
  const double eps = 1e-5;
  const double w = p.cavity_freq;
  const std::vector<double> probe{w - p.kappa / 2, w, w + p.kappa / 2};
  const auto scan = steady_transmission(p, probe, eps, w - 0.05, 0.0);
  for (const auto& pt : scan.points) CHECK(pt.converged);
  CHECK(scan.points[1].magnitude == doctest::Approx(eps / p.kappa).epsilon(1e-6));
  CHECK(scan.points[0].magnitude == doctest::Approx(scan.points[1].magnitude / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(scan.points[2].magnitude == doctest::Approx(scan.points[1].magnitude / std::sqrt(2.0)).epsilon(1e-6));
  CHECK(resonance_frequency(p, span(w - 3 * p.kappa, w + 3 * p.kappa, 13), eps, w - 0.05, 0.0) ==
        doctest::Approx(w).epsilon(1e-9));

  // Linear response: the normalized lineshape does not depend on the probe strength.
  const auto half = steady_transmission(p, probe, eps / 2, w - 0.05, 0.0);
  for (int k = 0; k < 3; ++k)
    CHECK(half.points[k].magnitude / half.points[1].magnitude ==
          doctest::Approx(scan.points[k].magnitude / scan.points[1].magnitude).epsilon(1e-3));
}

TEST_CASE("pump photons pull a softening cavity down") {
  SystemParams p;
  p.n_levels = 2;
  p.n_photons = 32;
  p.g01 = 0;
  p.detuning = -1.0;
  const auto coarse = span(p.cavity_freq - 3e-3, p.cavity_freq + 1e-3, 41);
  double n_low = 0, n_high = 0;
  const double f_low = resonance_frequency(p, coarse, 1e-6, p.cavity_freq - 0.05, 0.4, &n_low);
  const double f_high = resonance_frequency(p, coarse, 1e-6, p.cavity_freq - 0.05, 10.0, &n_high);
  CHECK(n_low == doctest::Approx(0.4).epsilon(0.05));
  CHECK(n_high == doctest::Approx(10.0).epsilon(0.05));
  CHECK(f_high < f_low);
  CHECK((f_high - f_low) / (n_high - n_low) == doctest::Approx(2 * p.kerr).epsilon(0.05));
}

TEST_CASE("dynamical and spectral nonlinearity agree in the dispersive regime") {
  SystemParams p;
  p.detuning = -2.0;
  p.n_levels = 4;
  p.n_photons = 8;
  const double lam = effective_params(p).lambda;
  const std::vector<BasisLabel> labels{{0, 0}, {0, 1}};
  const auto e = dressed_energies(p, labels);
  const double center = e[1] - e[0];
  const auto coarse = span(center - 2e-3, center + 1e-3, 31);
  std::vector<double> n, f;
  for (double nbar : {0.25, 0.5, 0.75, 1.0}) {
    double got = 0;
    f.push_back(resonance_frequency(p, coarse, 1e-6, center - 0.05, nbar, &got));
    n.push_back(got);
  }
  const double slope = (f.back() - f.front()) / (n.back() - n.front());
  CHECK(slope == doctest::Approx(-2 * lam).epsilon(0.20));
}

}
