#pragma once

// Independent reference implementations used only by the tests.

#include <Eigen/Dense>
#include <vector>

#include "autores/model.hpp"

namespace oracle {

/// rho(t) = exp(L t) rho0 for a time-independent Lindbladian built from its
/// action on matrix units (no Kronecker identities involved). h in GHz,
/// collapse operators already carry sqrt(angular rate).
Eigen::MatrixXcd lindblad_evolve(const Eigen::MatrixXcd& h, const std::vector<Eigen::MatrixXcd>& collapse,
                                 const Eigen::MatrixXcd& rho0, double t);

/// Lindblad steady state as the null vector of the same superoperator.
Eigen::MatrixXcd lindblad_steady_state(const Eigen::MatrixXcd& h, const std::vector<Eigen::MatrixXcd>& collapse);

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Closed-system evolution in the lab frame under
/// H(t) = h + (amp/2) (a e^{i 2 pi f t} + a^dag e^{-i 2 pi f t}), fixed-step RK4.
Eigen::VectorXcd lab_frame_evolve(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& a, double amp, double freq,
                                  const Eigen::VectorXcd& psi0, double t, double dt);

/// Rotating-frame Hamiltonian of the fixed-frequency drive, GHz:
/// H_rwa - f N + amp (a + a^dag) / 2.
Eigen::MatrixXcd rotating_hamiltonian(const autores::SystemParams& p, double freq, double amp);

}  // namespace oracle
