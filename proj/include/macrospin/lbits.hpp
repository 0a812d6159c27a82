#pragma once

// Effective fully many-body-localized model written in l-bits,
//
//   H_eff = sum_i e_i tau_z^i + sum_{i,j} V_ij tau_z^i tau_z^j (+ optional three-body terms),
//
// with tau_z^i identified with sigma_z^(i). The Hamiltonian is diagonal in the
// computational basis, so evolution is a pure phase per basis state.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "macrospin/spin_core.hpp"

namespace macrospin {

struct ThreeBodyTerm {
  int i = 0;
  int j = 0;
  int k = 0;
  double strength = 0.0;
};

struct LbitModel {
  int n_sites = 0;
  Eigen::VectorXd onsite;          // e_i
  Eigen::MatrixXd pair_couplings;  // V_ij, symmetric, zero diagonal
  double xi2 = 1.0;                // decay length of V in sites
  std::uint64_t seed = 0;
  // Hook for V_ijk tau_z tau_z tau_z; generate_lbit_model never fills it.
  std::vector<ThreeBodyTerm> three_body;
};

// e_i uniform on [-energy_scale, energy_scale]; V_ij = u_ij coupling_scale
// exp(-|i-j|/xi2) with u_ij uniform on [-1, 1]. Throws ValidationError for
// xi2 <= 0.
LbitModel generate_lbit_model(int n_sites, double xi2, double energy_scale,
                              double coupling_scale, std::uint64_t seed);

// Diagonal energy of every computational basis state:
// E(b) = sum_i e_i z_i + sum_{i<j} 2 V_ij z_i z_j (+ three-body terms).
Eigen::VectorXd lbit_energy_table(const LbitModel& model);

StateVector lbit_evolve(const LbitModel& model, const StateVector& state, double t);
// Reuses a precomputed energy table.
StateVector lbit_evolve(const Eigen::VectorXd& energy_table, const StateVector& state, double t);
std::vector<StateVector> lbit_evolve_grid(const LbitModel& model, const StateVector& state,
                                          std::span<const double> times);

// Overlaps beta_i of tau_z^i with the single-site Pauli vector, |beta_i| <= 1,
// and c = min_i |beta_i|^2.
struct LbitAxes {
  std::vector<Vec3> betas;
  double c = 0.0;

  // Throws ValidationError if any |beta_i| > 1 + 1e-12 or is zero.
  static LbitAxes from_betas(std::vector<Vec3> betas);
  static LbitAxes z_aligned(int n_sites);

  std::vector<Vec3> unit_axes() const;
};

// c^2 max_B V_B(psi0) over B = sum_i (+/- beta_hat_i) . sigma^(i).
double macroscopicity_lower_bound(const LbitAxes& axes, const StateVector& psi0);

}  // namespace macrospin
