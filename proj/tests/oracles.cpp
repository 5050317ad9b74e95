#include "oracles.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "autores/params.hpp"

namespace oracle {

namespace {

using Mat = Eigen::MatrixXcd;

Mat apply_lindblad(const Mat& h, const std::vector<Mat>& collapse, const Mat& rho) {
  const std::complex<double> i(0, 1);
  Mat out = -i * autores::kTwoPi * (h * rho - rho * h);
  for (const auto& c : collapse) {
    const Mat cdc = c.adjoint() * c;
    out += c * rho * c.adjoint() - 0.5 * (cdc * rho + rho * cdc);
  }
  return out;
}

// Row-major flattening on purpose, unlike the library.
Mat superoperator(const Mat& h, const std::vector<Mat>& collapse) {
  const auto d = h.rows();
  Mat sup = Mat::Zero(d * d, d * d);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) {
      Mat unit = Mat::Zero(d, d);
      unit(r, c) = 1.0;
      const Mat img = apply_lindblad(h, collapse, unit);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) sup(i * d + j, r * d + c) = img(i, j);
    }
  return sup;
}

}  // namespace

Eigen::MatrixXcd lindblad_evolve(const Eigen::MatrixXcd& h, const std::vector<Eigen::MatrixXcd>& collapse,
                                 const Eigen::MatrixXcd& rho0, double t) {
  const auto d = h.rows();
  const Mat prop = (superoperator(h, collapse) * t).exp();
  Eigen::VectorXcd v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = rho0(i, j);
  const Eigen::VectorXcd w = prop * v;
  Mat rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = w(i * d + j);
  return rho;
}

Eigen::MatrixXcd lindblad_steady_state(const Eigen::MatrixXcd& h, const std::vector<Eigen::MatrixXcd>& collapse) {
  const auto d = h.rows();
  const Mat sup = superoperator(h, collapse);
  Eigen::ComplexEigenSolver<Mat> es(sup);
  Eigen::Index best = 0;
  es.eigenvalues().cwiseAbs().minCoeff(&best);
  const Eigen::VectorXcd v = es.eigenvectors().col(best);
  Mat rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
  return rho / rho.trace();
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Mat diff = a - b;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (diff + diff.adjoint()));
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Eigen::VectorXcd lab_frame_evolve(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& a, double amp, double freq,
                                  const Eigen::VectorXcd& psi0, double t, double dt) {
  const std::complex<double> mi(0, -autores::kTwoPi);
  auto rhs = [&](double s, const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
    const std::complex<double> ph = std::polar(1.0, autores::kTwoPi * freq * s);
    return mi * (h * x + 0.5 * amp * (ph * (a * x) + std::conj(ph) * (a.adjoint() * x)));
  };
  Eigen::VectorXcd x = psi0;
  const int steps = static_cast<int>(std::ceil(t / dt));
  const double hstep = t / steps;
  for (int k = 0; k < steps; ++k) {
    const double s = k * hstep;
    const Eigen::VectorXcd k1 = rhs(s, x);
    const Eigen::VectorXcd k2 = rhs(s + 0.5 * hstep, x + 0.5 * hstep * k1);
    const Eigen::VectorXcd k3 = rhs(s + 0.5 * hstep, x + 0.5 * hstep * k2);
    const Eigen::VectorXcd k4 = rhs(s + hstep, x + hstep * k3);
    x += hstep / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

Eigen::MatrixXcd rotating_hamiltonian(const autores::SystemParams& p, double freq, double amp) {
  return autores::build_hamiltonian(p, autores::Coupling::rwa) - freq * autores::excitation_number(p) +
         0.5 * amp * autores::drive_operator(p);
}

}  // namespace oracle
