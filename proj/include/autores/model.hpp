#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

#include "autores/params.hpp"

namespace autores {

/// Dense operator on transmon (x) cavity. Basis index = q * n_photons + n.
using OperatorMatrix = Eigen::MatrixXcd;

/// Full (a^dag + a) coupling, or the rotating-wave part |i><i+1| a^dag + h.c.
enum class Coupling { full, rwa };

/// Bare product-state label |q, n>.
struct BasisLabel {
  int q = 0;
  int n = 0;
  int excitations() const { return q + n; }
  bool operator==(const BasisLabel&) const = default;
};

inline int basis_index(const SystemParams& p, BasisLabel l) { return l.q * p.n_photons + l.n; }
inline BasisLabel basis_label(const SystemParams& p, int index) {
  return {index / p.n_photons, index % p.n_photons};
}

/// Duffing ladder from E_J and E_C, referenced to epsilon_0 = 0.
/// Throws ConfigError when the ladder inverts before n_levels.
std::vector<double> transmon_levels(double ej, double ec, int n_levels);

/// The Duffing ladder rigidly shifted so that epsilon_1 - epsilon_0 equals
/// cavity_freq + detuning. E_C still sets the anharmonicity.
std::vector<double> qubit_ladder(const SystemParams& p);

/// Nearest-neighbour coupling g_{i,i+1} = g01 sqrt(i+1), symmetric.
Eigen::MatrixXd coupling_matrix(double g01, int n_levels);

inline constexpr std::size_t kDefaultMaxDim = 4096;

/// Generalized Jaynes-Cummings-Kerr Hamiltonian in GHz, drive and dissipation off.
OperatorMatrix build_hamiltonian(const SystemParams& p, Coupling coupling = Coupling::full,
                                 std::size_t max_dim = kDefaultMaxDim);

/// identity (x) (a^dag + a)
OperatorMatrix drive_operator(const SystemParams& p);

OperatorMatrix cavity_annihilation(const SystemParams& p);
/// sum_i sqrt(i) |i-1><i| on the transmon.
OperatorMatrix transmon_lowering(const SystemParams& p);
OperatorMatrix photon_number(const SystemParams& p);
/// q + n, conserved by the RWA Hamiltonian when K = 0 or not.
OperatorMatrix excitation_number(const SystemParams& p);

struct CollapseChannel {
  std::string name;
  double rate = 0;      ///< angular, 1/ns
  OperatorMatrix op;    ///< sqrt(rate) * L
};

/// Cavity decay always; transmon decay when gamma1 > 0.
std::vector<CollapseChannel> collapse_operators(const SystemParams& p);

/// max |H - H^dag| <= tol * max |H|
bool is_hermitian(const OperatorMatrix& h, double rel_tol = 1e-12);

}  // namespace autores
