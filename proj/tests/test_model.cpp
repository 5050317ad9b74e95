#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "autores/error.hpp"
#include "autores/model.hpp"

using namespace autores;

namespace {

std::vector<double> sorted_eigenvalues(const OperatorMatrix& h) {
  Eigen::SelfAdjointEigenSolver<OperatorMatrix> es(h);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return v;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("Duffing ladder values") {
  const auto e2 = transmon_levels(100, 0.28, 2);
  CHECK(e2[0] == 0.0);
  CHECK(e2[1] - e2[0] == doctest::Approx(std::sqrt(224.0) - 0.28).epsilon(1e-14));
  CHECK(e2[1] == doctest::Approx(14.687).epsilon(1e-4));

  const auto e3 = transmon_levels(100, 0.28, 3);
  CHECK(e3[2] == doctest::Approx(29.094).epsilon(1e-4));
  CHECK(e3[2] - 2 * e3[1] + e3[0] == doctest::Approx(-0.28).epsilon(1e-12));

  const auto e = transmon_levels(20, 1.0, 5);
  for (std::size_t i = 0; i + 1 < e.size(); ++i) CHECK(e[i + 1] > e[i]);
  // sqrt(8*20*1) - 1 = 11.65, inversion once i * ec exceeds that
  CHECK_THROWS_AS(transmon_levels(20, 1.0, 14), ConfigError);
  CHECK_THROWS_AS(transmon_levels(0.1, 0.28, 3), ConfigError);
}

TEST_CASE("coupling ladder") {
  const auto g2 = coupling_matrix(0.118, 2);
  CHECK(g2(0, 1) == doctest::Approx(0.118));
  const auto g3 = coupling_matrix(0.118, 3);
  CHECK(g3(1, 2) == doctest::Approx(0.118 * std::sqrt(2.0)));
  CHECK(g3(1, 2) == doctest::Approx(0.16688).epsilon(1e-4));
  CHECK(g3(0, 2) == 0.0);
  CHECK((g3 - g3.transpose()).norm() == 0.0);
}

TEST_CASE("decoupled limit matches the analytic ladder") {
  SystemParams p;
  p.g01 = 0;
  p.n_levels = 4;
  p.n_photons = 6;
  p.detuning = 0.37;
  const auto eps = qubit_ladder(p);
  CHECK(eps[1] - eps[0] == doctest::Approx(p.cavity_freq + p.detuning).epsilon(1e-14));
  CHECK(eps[2] - 2 * eps[1] + eps[0] == doctest::Approx(-p.ec).epsilon(1e-12));
  for (auto c : {Coupling::full, Coupling::rwa}) {
    auto ev = sorted_eigenvalues(build_hamiltonian(p, c));
    std::vector<double> expect;
    for (int q = 0; q < p.n_levels; ++q)
      for (int n = 0; n < p.n_photons; ++n) expect.push_back(eps[q] + p.cavity_freq * n + p.kerr * n * (n - 1));
    std::sort(expect.begin(), expect.end());
    for (std::size_t k = 0; k < ev.size(); ++k) CHECK(std::abs(ev[k] - expect[k]) < 1e-10);
  }
}

TEST_CASE("single photon and Kerr pair") {
  SystemParams p;
  p.g01 = 0;
  p.kerr = 0;
  p.n_photons = 3;
  const auto h = build_hamiltonian(p);
  const int i1 = basis_index(p, {0, 1});
  CHECK(h(i1, i1).real() == doctest::Approx(5.3445).epsilon(1e-14));
  p.kerr = -6e-5;
  const auto hk = build_hamiltonian(p);
  const int i2 = basis_index(p, {0, 2});
  CHECK(hk(i2, i2).real() - 2 * 5.3445 == doctest::Approx(-1.2e-4).epsilon(1e-9));
}

TEST_CASE("Hermiticity and excitation-number blocks") {
  SystemParams p;
  p.detuning = 0.5;
  for (auto c : {Coupling::full, Coupling::rwa}) {
    const auto h = build_hamiltonian(p, c);
    CHECK(is_hermitian(h, 1e-12));
  }
  for (double k : {0.0, -6e-5}) {
    p.kerr = k;
    const auto h = build_hamiltonian(p, Coupling::rwa);
    const auto n = excitation_number(p);
    CHECK((h * n - n * h).cwiseAbs().maxCoeff() < 1e-10);
  }
  const auto hf = build_hamiltonian(p, Coupling::full);
  const auto n = excitation_number(p);
  CHECK((hf * n - n * hf).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("ladder operators") {
  SystemParams p;
  p.n_levels = 3;
  p.n_photons = 5;
  const auto a = cavity_annihilation(p);
  const OperatorMatrix comm = a * a.adjoint() - a.adjoint() * a;
  for (int i = 0; i < p.dim(); ++i) {
    if (basis_label(p, i).n == p.n_photons - 1) continue;
    for (int j = 0; j < p.dim(); ++j) CHECK(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)) < 1e-15);
  }
  const auto x = drive_operator(p);
  CHECK(is_hermitian(x));
  CHECK(x.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(x(basis_index(p, {0, 2}), basis_index(p, {0, 3})).real() == doctest::Approx(std::sqrt(3.0)));

  SystemParams q2;
  q2.n_levels = 2;
  q2.n_photons = 2;
  const auto x2 = drive_operator(q2);
  CHECK(x2(0, 1).real() == 1.0);
  CHECK(x2(1, 0).real() == 1.0);
  CHECK(x2(0, 0).real() == 0.0);
  CHECK(x2(0, 2).real() == 0.0);

  const auto b = transmon_lowering(p);
  CHECK(b(basis_index(p, {1, 0}), basis_index(p, {2, 0})).real() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("collapse channels") {
  SystemParams p = device_params();
  CHECK(p.kappa == doctest::Approx(5.938e-4).epsilon(1e-3));
  CHECK(kappa_from_quality(5.3445, 9000) == doctest::Approx(5.3445 / 9000));
  CHECK(gamma1_from_t1(1000) == doctest::Approx(1.592e-4).epsilon(1e-3));
  CHECK(t1_from_gamma1(gamma1_from_t1(1000)) == doctest::Approx(1000));
  auto ch = collapse_operators(p);
  REQUIRE(ch.size() == 2);
  CHECK(ch[0].rate == doctest::Approx(kTwoPi * p.kappa));
  const auto a = cavity_annihilation(p);
  CHECK((ch[0].op - std::sqrt(ch[0].rate) * a).norm() < 1e-14);
  p.gamma1 = 0;
  CHECK(collapse_operators(p).size() == 1);
}

TEST_CASE("validation and sizing guard") {
  SystemParams p;
  p.kappa = 0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("system.kappa"), ConfigError);
  p = {};
  p.n_photons = 1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.n_photons = 1000;
  CHECK_THROWS_WITH_AS(build_hamiltonian(p), doctest::Contains("reduce n_photons"), ConfigError);
}

TEST_CASE("truncation stability at drive-off") {
  SystemParams p;
  p.detuning = -1.0;
  p.n_levels = 3;
  p.n_photons = 12;
  auto a = sorted_eigenvalues(build_hamiltonian(p, Coupling::rwa));
  SystemParams p2 = p;
  p2.n_photons = 24;
  auto b = sorted_eigenvalues(build_hamiltonian(p2, Coupling::rwa));
  for (int k = 0; k < 2 * p.n_levels * 4; ++k) CHECK(std::abs(a[k] - b[k]) < 1e-6);
  SystemParams f = p, f2 = p2;
  f.n_photons = 16;
  f2.n_photons = 32;
  auto c = sorted_eigenvalues(build_hamiltonian(f, Coupling::full));
  auto d = sorted_eigenvalues(build_hamiltonian(f2, Coupling::full));
  for (int k = 0; k < 2 * p.n_levels * 4; ++k) CHECK(std::abs(c[k] - d[k]) < 1e-6);
}

TEST_CASE("dispersive pull against second-order perturbation theory") {
  SystemParams p;
  p.detuning = -2.64;
  p.kerr = 0;
  p.n_photons = 4;
  const auto ev = sorted_eigenvalues(build_hamiltonian(p, Coupling::rwa));
  // qubit sits below the cavity here; take the level nearest one photon up
  double e1 = ev[1];
  for (std::size_t k = 1; k < ev.size(); ++k)
    if (std::abs(ev[k] - ev[0] - p.cavity_freq) < std::abs(e1 - ev[0] - p.cavity_freq)) e1 = ev[k];
  const double pull = e1 - ev[0] - p.cavity_freq;
  const double g = p.g01, d = p.detuning;
  CHECK(pull == doctest::Approx(-g * g / d).epsilon(0.02));
  CHECK(std::abs(pull) == doctest::Approx(5.3e-3).epsilon(0.02));
}

}
