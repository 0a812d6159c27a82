#pragma once

// Data-parallel inner loops. Every kernel has a plain serial reference in
// kernels::serial and an OpenMP version in kernels::omp with identical
// results; the module APIs call the OpenMP versions, tests compare both and
// bench/bench_kernels times them.

#include <Eigen/Dense>

#include <span>

#include "macrospin/spin_core.hpp"

namespace macrospin::kernels {

struct XxzCouplings {
  int n_sites = 0;
  double j_perp = 1.0;
  double j_z = 1.0;
  double gamma = 0.0;
  bool periodic = true;
};

// Diagonal (z-basis) energy of the effective l-bit Hamiltonian for every
// basis index: sum_i e_i z_i + sum_{i<j} 2 V_ij z_i z_j.
struct LbitCouplings {
  const Eigen::VectorXd* onsite = nullptr;
  const Eigen::MatrixXd* pair = nullptr;
};

namespace serial {

// D x 3N matrix whose column 3i+a is sigma_a^(i)|psi>.
Eigen::MatrixXcd pauli_partials(std::span<const cplx> psi, int n_sites);
CorrelationMatrix correlation_matrix(std::span<const cplx> psi, int n_sites);
// Dense XXZ Hamiltonian with spin operators s = sigma/2.
Eigen::MatrixXd xxz_matrix(const XxzCouplings& c, std::span<const double> fields);
// Column k = sum_a V(:,a) coeffs(a) exp(-i E_a t_k).
Eigen::MatrixXcd evolve_grid(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& energies,
                             const Eigen::VectorXcd& coeffs, std::span<const double> times);
Eigen::VectorXd lbit_energies(const LbitCouplings& c);

}  // namespace serial

namespace omp {

Eigen::MatrixXcd pauli_partials(std::span<const cplx> psi, int n_sites);
CorrelationMatrix correlation_matrix(std::span<const cplx> psi, int n_sites);
Eigen::MatrixXd xxz_matrix(const XxzCouplings& c, std::span<const double> fields);
Eigen::MatrixXcd evolve_grid(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& energies,
                             const Eigen::VectorXcd& coeffs, std::span<const double> times);
Eigen::VectorXd lbit_energies(const LbitCouplings& c);

}  // namespace omp

}  // namespace macrospin::kernels
