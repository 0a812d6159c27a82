#pragma once

// Full diagonalization, exact time evolution and infinite-time averages.

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "macrospin/models.hpp"
#include "macrospin/spin_core.hpp"

namespace macrospin {

struct EigenDecomposition {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXd vectors;   // column a is |a>
  int n_sites = 0;

  Eigen::Index dim() const noexcept { return energies.size(); }
  double spectral_width() const { return energies[dim() - 1] - energies[0]; }
  // max |E_a|, the operator norm of H
  double operator_norm() const;
};

// Throws ValidationError for a non-symmetric matrix and NumericalError (with
// the disorder seed in the message) if the eigensolver fails.
EigenDecomposition diagonalize(const Hamiltonian& h);
EigenDecomposition diagonalize(const Eigen::MatrixXd& matrix, int n_sites,
                               std::uint64_t seed_for_diagnostics = 0);

// |psi(0)> = sum_a C_a |a>.
class SpectralState {
 public:
  SpectralState(std::shared_ptr<const EigenDecomposition> eig, const StateVector& state);

  const Eigen::VectorXcd& coeffs() const noexcept { return coeffs_; }
  const EigenDecomposition& decomposition() const noexcept { return *eig_; }
  const std::shared_ptr<const EigenDecomposition>& shared_decomposition() const noexcept {
    return eig_;
  }
  int n_sites() const noexcept { return eig_->n_sites; }
  // sum_a |C_a|^2 E_a
  double mean_energy() const;

 private:
  std::shared_ptr<const EigenDecomposition> eig_;
  Eigen::VectorXcd coeffs_;
};

StateVector evolve(const SpectralState& spectral, double t);
std::vector<StateVector> evolve_grid(const SpectralState& spectral, std::span<const double> times);

// Eigenvalues closer than 1e-10 * |H| are treated as one degenerate level.
double degeneracy_tolerance(const EigenDecomposition& eig);
// Start index of each degenerate level plus a trailing dim() sentinel.
std::vector<Eigen::Index> degenerate_levels(const Eigen::VectorXd& energies, double tolerance);

// Columns are P_g|psi> for every degenerate level g (just C_a|a> when the
// spectrum is non-degenerate).
Eigen::MatrixXcd level_projections(const SpectralState& spectral);

// Infinite-time average: sum_g <psi|P_g O P_g|psi>, which reduces to
// sum_a |C_a|^2 <a|O|a> for a non-degenerate spectrum.
double diagonal_ensemble_average(const SpectralState& spectral, const ObservableApply& observable);

// Infinite-time variance of <O(t)> around its average,
// sum_{g != g'} |<psi|P_g O P_g'|psi>|^2 (non-degenerate gaps assumed).
double temporal_fluctuation(const SpectralState& spectral, const ObservableApply& observable);

// Logarithmic time grid with a fixed number of points per decade,
// inclusive of both ends.
struct TimeGrid {
  double t_min = 0.1;
  double t_max = 1e4;
  int points_per_decade = 60;

  std::vector<double> times() const;
};

// Late-time interval over which time series are averaged into a single
// "saturated" value.
struct SaturationWindow {
  double t_begin = 1e3;
  double t_end = 1e4;

  bool contains(double t) const noexcept { return t >= t_begin * (1 - 1e-12) && t <= t_end * (1 + 1e-12); }
};

// Mean of values[k] over times[k] inside the window; NaN if none fall inside.
double saturated_mean(std::span<const double> times, std::span<const double> values,
                      const SaturationWindow& window);

}  // namespace macrospin
