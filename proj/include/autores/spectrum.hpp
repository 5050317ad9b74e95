#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "autores/model.hpp"

namespace autores {

struct Eigensystem {
  Eigen::VectorXd values;    ///< ascending
  Eigen::MatrixXcd vectors;  ///< orthonormal columns
};

/// Rejects non-Hermitian input with NumericalError.
Eigensystem eigenspectrum(const OperatorMatrix& h);

/// One adiabatically continued eigenlevel over a detuning grid.
struct Branch {
  BasisLabel label;
  std::vector<double> energies;       ///< GHz, one per grid point
  std::vector<double> overlap_trace;  ///< |<label|psi>|^2 per grid point
};

struct BranchTable {
  std::vector<double> detunings;
  std::vector<Branch> branches;
  std::vector<std::size_t> flagged;  ///< grid indices with ambiguous continuation
  std::size_t refinements = 0;       ///< intermediate points inserted to keep overlaps high

  const Branch* find(BasisLabel label) const;
};

struct TrackingOptions {
  int max_excitation = 6;
  double min_overlap = 0.5;
  int max_refine_depth = 12;
  double ambiguity_tol = 1e-3;
  Coupling coupling = Coupling::rwa;
};

/// Labels eigenlevels along a sorted detuning grid. Labels are seeded from the
/// bare states at the grid edge farthest from resonance and continued by
/// maximum eigenvector overlap; intervals whose best overlap falls below
/// min_overlap are bisected. `p.detuning` is ignored.
BranchTable track_branches(const SystemParams& p, std::span<const double> detuning_grid,
                           const TrackingOptions& opts = {});

struct AvoidedCrossing {
  double detuning_at_min = 0;
  double gap = 0;
  BasisLabel a;  ///< lower qubit index
  BasisLabel b;
  int manifold = 0;

  std::string pair_name() const;
};

/// Local gap minima between label-adjacent branches (q, N-q) and (q+1, N-q-1)
/// in manifold N, refined by a parabola through the three smallest-gap points.
/// Branches that actually cross (gap changes sign) are not reported.
std::vector<AvoidedCrossing> find_avoided_crossings(const BranchTable& branches, int manifold);

/// Coefficients of E_n = eps + omega n - lambda n^2.
struct EffectiveParams {
  double eps = 0;
  double omega = 0;
  double lambda = 0;
  double fit_residual = 0;  ///< RMS, GHz
};

/// Least-squares fit of ladder energies E_0..E_m.
EffectiveParams fit_ladder(std::span<const double> energies);

/// Energies of the eigenstates with the largest weight on each bare label at a
/// single operating point. Throws NumericalError when two eigenstates claim a
/// label within `ambiguity_tol` or one eigenstate claims two labels.
std::vector<double> dressed_energies(const SystemParams& p, std::span<const BasisLabel> labels,
                                     Coupling coupling = Coupling::rwa, double ambiguity_tol = 1e-3);

inline constexpr int kDefaultFitPhotons = 5;

/// Fit of the ground-qubit ladder E(0, n), n = 0..n_fit.
EffectiveParams effective_params(const SystemParams& p, int n_fit = kDefaultFitPhotons,
                                 Coupling coupling = Coupling::rwa);

/// E(q,1) - E(q,0) - cavity_freq.
double dispersive_shift(const SystemParams& p, int qubit_state);

}  // namespace autores
