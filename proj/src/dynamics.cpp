#include "macrospin/dynamics.hpp"

#include <lapacke.h>

#include <cmath>
#include <limits>
#include <string>

#include "macrospin/errors.hpp"
#include "macrospin/kernels.hpp"

namespace macrospin {

double EigenDecomposition::operator_norm() const {
  return std::max(std::abs(energies[0]), std::abs(energies[dim() - 1]));
}

EigenDecomposition diagonalize(const Hamiltonian& h) {
  return diagonalize(h.matrix, h.n_sites(), h.realization.seed);
}

EigenDecomposition diagonalize(const Eigen::MatrixXd& matrix, int n_sites,
                               std::uint64_t seed_for_diagnostics) {
  if (matrix.rows() != matrix.cols() || matrix.rows() != (Eigen::Index{1} << n_sites))
    throw ValidationError("Hamiltonian dimension does not match 2^N");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("Hamiltonian is not symmetric");

  EigenDecomposition out;
  out.n_sites = n_sites;
  out.vectors = matrix;
  out.energies.resize(matrix.rows());
  const auto n = static_cast<lapack_int>(matrix.rows());
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n,
                                         out.energies.data());
  if (info != 0)
    throw NumericalError("eigensolver failed (info = " + std::to_string(info) +
                         ") for disorder seed " + std::to_string(seed_for_diagnostics));
  return out;
}

SpectralState::SpectralState(std::shared_ptr<const EigenDecomposition> eig,
                             const StateVector& state)
    : eig_(std::move(eig)) {
  if (state.dim() != eig_->dim()) throw ValidationError("state and Hamiltonian sizes differ");
  const Eigen::VectorXd re = eig_->vectors.transpose() * state.amplitudes().real();
  const Eigen::VectorXd im = eig_->vectors.transpose() * state.amplitudes().imag();
  coeffs_.resize(re.size());
  for (Eigen::Index a = 0; a < re.size(); ++a) coeffs_[a] = cplx(re[a], im[a]);
}

double SpectralState::mean_energy() const {
  return coeffs_.cwiseAbs2().dot(eig_->energies);
}

StateVector evolve(const SpectralState& spectral, double t) {
  const double times[] = {t};
  return std::move(evolve_grid(spectral, times).front());
}

std::vector<StateVector> evolve_grid(const SpectralState& spectral, std::span<const double> times) {
  const EigenDecomposition& eig = spectral.decomposition();
  const Eigen::MatrixXcd columns =
      kernels::omp::evolve_grid(eig.vectors, eig.energies, spectral.coeffs(), times);
  std::vector<StateVector> out;
  out.reserve(times.size());
  for (Eigen::Index k = 0; k < columns.cols(); ++k)
    out.emplace_back(columns.col(k), spectral.n_sites());
  return out;
}

double degeneracy_tolerance(const EigenDecomposition& eig) {
  return 1e-10 * std::max(eig.operator_norm(), std::numeric_limits<double>::min());
}

std::vector<Eigen::Index> degenerate_levels(const Eigen::VectorXd& energies, double tolerance) {
  std::vector<Eigen::Index> starts;
  for (Eigen::Index a = 0; a < energies.size(); ++a) {
    if (a == 0 || energies[a] - energies[a - 1] > tolerance) starts.push_back(a);
  }
  starts.push_back(energies.size());
  return starts;
}

Eigen::MatrixXcd level_projections(const SpectralState& spectral) {
  const EigenDecomposition& eig = spectral.decomposition();
  const auto levels = degenerate_levels(eig.energies, degeneracy_tolerance(eig));
  const auto n_levels = static_cast<Eigen::Index>(levels.size() - 1);
  Eigen::MatrixXcd phi(eig.dim(), n_levels);
  const Eigen::VectorXcd& c = spectral.coeffs();
  for (Eigen::Index g = 0; g < n_levels; ++g) {
    const Eigen::Index begin = levels[static_cast<std::size_t>(g)];
    const Eigen::Index count = levels[static_cast<std::size_t>(g) + 1] - begin;
    const Eigen::VectorXd re = eig.vectors.middleCols(begin, count) * c.segment(begin, count).real();
    const Eigen::VectorXd im = eig.vectors.middleCols(begin, count) * c.segment(begin, count).imag();
    for (Eigen::Index k = 0; k < eig.dim(); ++k) phi(k, g) = cplx(re[k], im[k]);
  }
  return phi;
}

double diagonal_ensemble_average(const SpectralState& spectral, const ObservableApply& observable) {
  const Eigen::MatrixXcd phi = level_projections(spectral);
  double total = 0.0;
  for (Eigen::Index g = 0; g < phi.cols(); ++g) {
    const Eigen::VectorXcd v = phi.col(g);
    if (v.squaredNorm() == 0.0) continue;
    total += v.dot(observable(v)).real();
  }
  return total;
}

double temporal_fluctuation(const SpectralState& spectral, const ObservableApply& observable) {
  const Eigen::MatrixXcd phi = level_projections(spectral);
  Eigen::MatrixXcd applied(phi.rows(), phi.cols());
  for (Eigen::Index g = 0; g < phi.cols(); ++g) applied.col(g) = observable(phi.col(g));
  const Eigen::MatrixXcd overlaps = phi.adjoint() * applied;
  return overlaps.cwiseAbs2().sum() - overlaps.diagonal().cwiseAbs2().sum();
}

std::vector<double> TimeGrid::times() const {
  if (!(t_min > 0.0) || !(t_max >= t_min) || points_per_decade < 1)
    throw ValidationError("time grid needs 0 < t_min <= t_max and a positive density");
  const double lo = std::log10(t_min);
  const double decades = std::log10(t_max) - lo;
  const auto steps = static_cast<long>(std::llround(decades * points_per_decade));
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (long k = 0; k <= steps; ++k)
    out.push_back(std::pow(10.0, lo + static_cast<double>(k) / points_per_decade));
  return out;
}

double saturated_mean(std::span<const double> times, std::span<const double> values,
                      const SaturationWindow& window) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!window.contains(times[k])) continue;
    sum += values[k];
    ++count;
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace macrospin
