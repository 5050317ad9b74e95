#include <doctest.h>

#include <cmath>

#include "autores/analysis.hpp"
#include "autores/error.hpp"
#include "autores/rng.hpp"
#include "autores/spectrum.hpp"

using namespace autores;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int k = 0; k < n; ++k) g.push_back(lo + (hi - lo) * k / (n - 1));
  return g;
}

SCurve step_curve(const std::vector<double>& amps, double v0, int trials = 100) {
  std::vector<int> k, n;
  for (double a : amps) {
    k.push_back(a > v0 ? trials : 0);
    n.push_back(trials);
  }
  return SCurve::from_counts(amps, k, n);
}

SCurve logistic_curve(const std::vector<double>& amps, double v, double w, int trials, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<int> k, n;
  for (double a : amps) {
    const double p = 1.0 / (1.0 + std::exp(-(a - v) / w));
    int c = 0;
    for (int t = 0; t < trials; ++t) c += rng.uniform() < p;
    k.push_back(c);
    n.push_back(trials);
  }
  return SCurve::from_counts(amps, k, n);
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("perfect step") {
  const auto amps = grid(0.9, 1.1, 21);
  const auto r = fit_threshold(step_curve(amps, 1.005));
  CHECK(r.v_half == doctest::Approx(1.005).epsilon(1e-6));
  CHECK(r.width == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(r.width_at_floor);
}

TEST_CASE("logistic recovery with binomial noise") {
  const auto amps = grid(0.7, 1.3, 25);
  int inside_v = 0, inside_w = 0;
  const int reps = 20;
  for (int s = 0; s < reps; ++s) {
    const auto r = fit_threshold(logistic_curve(amps, 1.0, 0.05, 1000, 100 + s));
    CHECK_FALSE(r.width_at_floor);
    inside_v += std::abs(r.v_half - 1.0) < 2 * r.v_half_err;
    inside_w += std::abs(r.width - 0.05 * std::log(81.0)) < 2 * r.width_err;
    CHECK(r.fit_residual < 0.05);
  }
  // ~95% coverage expected
  CHECK(inside_v >= 16);
  CHECK(inside_w >= 16);
}

TEST_CASE("rescaling the amplitude axis rescales the fit") {
  const auto amps = grid(0.7, 1.3, 25);
  const auto c = logistic_curve(amps, 1.0, 0.05, 400, 7);
  SCurve c2 = c;
  for (auto& a : c2.amplitudes) a *= 2;
  const auto r1 = fit_threshold(c), r2 = fit_threshold(c2);
  CHECK(r2.v_half == doctest::Approx(2 * r1.v_half).epsilon(1e-8));
  CHECK(r2.width == doctest::Approx(2 * r1.width).epsilon(1e-6));

  const auto s1 = fit_threshold(step_curve(amps, 1.01));
  SCurve s2 = step_curve(amps, 1.01);
  for (auto& a : s2.amplitudes) a *= 2;
  CHECK(fit_threshold(s2).width == doctest::Approx(2 * s1.width).epsilon(1e-9));
}

TEST_CASE("span precondition") {
  const auto amps = grid(0.9, 1.0, 11);
  const auto c = logistic_curve(amps, 1.2, 0.05, 200, 1);
  CHECK_THROWS_WITH_AS(fit_threshold(c), doctest::Contains("needs P < 0.1 and P > 0.9"), NumericalError);
}

TEST_CASE("fidelity") {
  const auto amps = grid(0.9, 1.1, 21);
  const auto s0 = step_curve(amps, 1.045);
  auto s1 = step_curve(amps, 0.955);
  s1.qubit_init = 1;
  const auto same = fidelity(s0, s0, 1000, 0.0);
  CHECK(same.f_raw == 0.0);

  const auto r = fidelity(s0, s1, 1000, 200.0);
  CHECK(r.f_raw == 1.0);
  CHECK(r.v_opt == doctest::Approx(0.96));  // smallest amplitude of the tie
  CHECK(r.survival == doctest::Approx(std::exp(-0.2)));
  CHECK(r.survival == doctest::Approx(0.819).epsilon(1e-3));
  CHECK(r.f_t1_corrected == 1.0);
  CHECK(fidelity(s1, s0, 1000, 200.0).f_raw == r.f_raw);

  auto partial = step_curve(amps, 1.045);
  partial.probs[10] = 0.6;
  const auto q = fidelity(s0, partial, 1000, 200.0);
  CHECK(q.f_raw == doctest::Approx(0.6));
  CHECK(q.f_t1_corrected == doctest::Approx(0.6 / std::exp(-0.2)));
  CHECK(q.f_t1_corrected >= q.f_raw);

  auto timed = s1;
  timed.median_capture_time.assign(amps.size(), 150.0);
  CHECK(fidelity(s0, timed, 1000).capture_time_used == 150.0);

  auto other = step_curve(grid(0.9, 1.2, 21), 1.0);
  CHECK_THROWS_AS(fidelity(s0, other, 1000), ConfigError);
}

TEST_CASE("Stark calibration") {
  SystemParams p;
  p.detuning = 2.64;
  CHECK(stark_calibration(p, -0.05, 0.0) == 0.0);
  const double n1 = stark_calibration(p, -0.05, 0.01);
  const double n2 = stark_calibration(p, -0.05, 0.02);
  const double n3 = stark_calibration(p, -0.10, 0.02);
  CHECK(n2 > n1);
  CHECK(n3 < n2);
  CHECK(n1 == doctest::Approx(0.25e-4 / (0.0025 + 0.25 * p.kappa * p.kappa)));
  CHECK_THROWS_AS(stark_calibration(p, 0.0, 0.01), ConfigError);
  CHECK(stark_calibration(p, 0.0, 0.01, true) == doctest::Approx(std::pow(0.01 / p.kappa, 2)));
  SystemParams near = p;
  near.detuning = 0.1;
  CHECK_THROWS_AS(stark_calibration(near, -0.05, 0.01), ConfigError);

  const double shift = qubit_stark_shift(p, n1);
  CHECK(shift == doctest::Approx((dispersive_shift(p, 1) - dispersive_shift(p, 0)) * n1));
  CHECK(shift != 0.0);
}

TEST_CASE("median ignores missing values") {
  CHECK(nan_median({1.0, NAN, 3.0}) == 2.0);
  CHECK(std::isnan(nan_median({NAN})));
}

}
