#include "autores/model.hpp"

#include <cmath>
#include <string>

#include "autores/error.hpp"

namespace autores {

std::vector<double> transmon_levels(double ej, double ec, int n_levels) {
  if (!(ec > 0) || !(ej > ec)) throw ConfigError("transmon_levels requires ej > ec > 0");
  if (n_levels < 1) throw ConfigError("transmon_levels requires n_levels >= 1");
  const double plasma = std::sqrt(8.0 * ej * ec) - ec;
  std::vector<double> eps(n_levels);
  for (int i = 0; i < n_levels; ++i) eps[i] = i * plasma - 0.5 * ec * i * (i - 1);
  for (int i = 0; i + 1 < n_levels; ++i) {
    if (eps[i + 1] <= eps[i]) {
      throw ConfigError("Duffing ladder inverts at level " + std::to_string(i + 1) +
                        "; reduce n_levels below " + std::to_string(i + 1));
    }
  }
  return eps;
}

std::vector<double> qubit_ladder(const SystemParams& p) {
  auto eps = transmon_levels(p.ej, p.ec, p.n_levels);
  const double shift = p.qubit_freq() - (eps.size() > 1 ? eps[1] - eps[0] : 0.0);
  for (std::size_t i = 0; i < eps.size(); ++i) eps[i] += shift * static_cast<double>(i);
  for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
    if (eps[i + 1] <= eps[i]) {
      throw ConfigError("shifted Duffing ladder inverts at level " + std::to_string(i + 1) +
                        " for qubit frequency " + std::to_string(p.qubit_freq()) + " GHz");
    }
  }
  return eps;
}

Eigen::MatrixXd coupling_matrix(double g01, int n_levels) {
  if (!(g01 >= 0)) throw ConfigError("coupling_matrix requires g01 >= 0");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_levels, n_levels);
  for (int i = 0; i + 1 < n_levels; ++i) g(i, i + 1) = g(i + 1, i) = g01 * std::sqrt(i + 1.0);
  return g;
}

namespace {

Eigen::MatrixXd ladder(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

OperatorMatrix kron(const Eigen::MatrixXd& qubit, const Eigen::MatrixXd& cavity) {
  const auto nq = qubit.rows();
  const auto nc = cavity.rows();
  OperatorMatrix out = OperatorMatrix::Zero(nq * nc, nq * nc);
  for (Eigen::Index i = 0; i < nq; ++i)
    for (Eigen::Index j = 0; j < nq; ++j)
      if (qubit(i, j) != 0.0) out.block(i * nc, j * nc, nc, nc) = (qubit(i, j) * cavity).cast<std::complex<double>>();
  return out;
}

}  // namespace

OperatorMatrix build_hamiltonian(const SystemParams& p, Coupling coupling, std::size_t max_dim) {
  p.validate();
  const auto dim = static_cast<std::size_t>(p.dim());
  if (dim > max_dim) {
    throw ConfigError("Hilbert space dimension " + std::to_string(dim) + " exceeds limit " +
                      std::to_string(max_dim) + "; reduce n_photons (now " +
                      std::to_string(p.n_photons) + ") or n_levels (now " +
                      std::to_string(p.n_levels) + ")");
  }
  const int nc = p.n_photons;
  const auto eps = qubit_ladder(p);
  const auto g = coupling_matrix(p.g01, p.n_levels);

  OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
  for (int q = 0; q < p.n_levels; ++q) {
    for (int n = 0; n < nc; ++n) {
      h(q * nc + n, q * nc + n) = eps[q] + p.cavity_freq * n + p.kerr * n * (n - 1.0);
    }
  }
  for (int q = 0; q + 1 < p.n_levels; ++q) {
    const double gq = g(q, q + 1);
    for (int n = 0; n < nc; ++n) {
      // |q><q+1| a^dag : |q+1, n> -> sqrt(n+1) |q, n+1>
      if (n + 1 < nc) {
        const double c = gq * std::sqrt(n + 1.0);
        h(q * nc + n + 1, (q + 1) * nc + n) += c;
        h((q + 1) * nc + n, q * nc + n + 1) += c;
      }
      // counter-rotating |q><q+1| a : |q+1, n> -> sqrt(n) |q, n-1>
      if (coupling == Coupling::full && n >= 1) {
        const double c = gq * std::sqrt(static_cast<double>(n));
        h(q * nc + n - 1, (q + 1) * nc + n) += c;
        h((q + 1) * nc + n, q * nc + n - 1) += c;
      }
    }
  }
  return h;
}

OperatorMatrix drive_operator(const SystemParams& p) {
  const auto a = ladder(p.n_photons);
  return kron(Eigen::MatrixXd::Identity(p.n_levels, p.n_levels), a + a.transpose());
}

OperatorMatrix cavity_annihilation(const SystemParams& p) {
  return kron(Eigen::MatrixXd::Identity(p.n_levels, p.n_levels), ladder(p.n_photons));
}

OperatorMatrix transmon_lowering(const SystemParams& p) {
  return kron(ladder(p.n_levels), Eigen::MatrixXd::Identity(p.n_photons, p.n_photons));
}

OperatorMatrix photon_number(const SystemParams& p) {
  const auto a = ladder(p.n_photons);
  return kron(Eigen::MatrixXd::Identity(p.n_levels, p.n_levels), a.transpose() * a);
}

OperatorMatrix excitation_number(const SystemParams& p) {
  OperatorMatrix n = OperatorMatrix::Zero(p.dim(), p.dim());
  for (int i = 0; i < p.dim(); ++i) n(i, i) = basis_label(p, i).excitations();
  return n;
}

std::vector<CollapseChannel> collapse_operators(const SystemParams& p) {
  p.validate();
  std::vector<CollapseChannel> out;
  const double kappa = kTwoPi * p.kappa;
  out.push_back({"cavity", kappa, std::sqrt(kappa) * cavity_annihilation(p)});
  if (p.gamma1 > 0) {
    const double gamma = kTwoPi * p.gamma1;
    out.push_back({"transmon", gamma, std::sqrt(gamma) * transmon_lowering(p)});
  }
  return out;
}

bool is_hermitian(const OperatorMatrix& h, double rel_tol) {
  if (h.rows() != h.cols()) return false;
  const double scale = h.cwiseAbs().maxCoeff();
  const double defect = (h - h.adjoint()).cwiseAbs().maxCoeff();
  return defect <= rel_tol * std::max(scale, 1e-300);
}

}  // namespace autores
