#pragma once

// Canonical and microcanonical ensembles over a full eigendecomposition, and
// the comparison between time-averaged quantum fluctuations of a macroscopic
// observable and the thermal fluctuation at the matched temperature.
//
// Temperatures are carried as beta = 1/T (k_B = 1) so that states above the
// middle of the spectrum map to negative beta without special cases.

#include <Eigen/Dense>

#include "macrospin/dynamics.hpp"
#include "macrospin/spin_core.hpp"

namespace macrospin {

struct EnsembleSpec {
  enum class Kind { canonical, microcanonical, diagonal };
  Kind kind = Kind::canonical;
  double beta = 0.0;
  double window_center = 0.0;
  double half_width = 0.0;
};

// <a|O|a> for every eigenvector.
Eigen::VectorXd eigenbasis_diagonal(const EigenDecomposition& eig, const ObservableApply& observable);

// Normalized Boltzmann weights using the max-shift trick. Throws
// NumericalError if the weights cannot be formed (non-finite beta or energies).
Eigen::VectorXd canonical_weights(const Eigen::VectorXd& energies, double beta);

double canonical_average(const EigenDecomposition& eig, const ObservableApply& observable, double beta);
double canonical_average(const Eigen::VectorXd& energies, const Eigen::VectorXd& diagonal, double beta);
double canonical_energy(const Eigen::VectorXd& energies, double beta);

// Solves <H>_beta = e_target by bisection on [-cap, cap], cap = 1e3 / width.
// Throws DomainError unless E_min < e_target < E_max.
double match_temperature(const EigenDecomposition& eig, double e_target);

// 0.025 * (E_max - E_min)
double default_half_width(const EigenDecomposition& eig);

// Number of eigenvalues with |E_a - center| <= half_width.
Eigen::Index microcanonical_count(const EigenDecomposition& eig, double center, double half_width);

// Unweighted mean of <a|O|a> over the window. Throws DomainError naming the
// nearest eigenvalue when the window is empty.
double microcanonical_average(const EigenDecomposition& eig, const ObservableApply& observable,
                              double center, double half_width);
double microcanonical_average(const Eigen::VectorXd& energies, const Eigen::VectorXd& diagonal,
                              double center, double half_width);

struct EthReport {
  double time_averaged_variance = 0.0;  // infinite-time mean of V_A(psi(t))
  double thermal_variance = 0.0;        // <A^2>_T - <A>_T^2 at the matched beta
  double difference = 0.0;
  double difference_over_n = 0.0;
  double difference_over_n2 = 0.0;
  double beta = 0.0;
  double mean_energy = 0.0;
  double temporal_fluctuation = 0.0;    // time variance of <A(t)>
};

// Time-averaged variance = diag(A^2) - diag(A)^2 - temporal fluctuation of
// <A(t)>, all evaluated in the eigenbasis; thermal side uses <a|A|a> and
// <a|A^2|a> = |A|a>|^2 weighted at the beta matching the state's energy.
EthReport eth_fluctuation_report(const SpectralState& spectral, const DirectionField& dirs);

}  // namespace macrospin
