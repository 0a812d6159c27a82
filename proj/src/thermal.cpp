#include "macrospin/thermal.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "macrospin/errors.hpp"

namespace macrospin {

Eigen::VectorXd eigenbasis_diagonal(const EigenDecomposition& eig, const ObservableApply& observable) {
  Eigen::VectorXd out(eig.dim());
  for (Eigen::Index a = 0; a < eig.dim(); ++a) {
    const Eigen::VectorXcd v = eig.vectors.col(a).cast<cplx>();
    out[a] = v.dot(observable(v)).real();
  }
  return out;
}

Eigen::VectorXd canonical_weights(const Eigen::VectorXd& energies, double beta) {
  if (!std::isfinite(beta)) throw NumericalError("inverse temperature is not finite");
  const Eigen::VectorXd exponent = -beta * energies;
  const double shift = exponent.maxCoeff();
  Eigen::VectorXd w = (exponent.array() - shift).exp().matrix();
  const double total = w.sum();
  if (!(total > 0.0) || !std::isfinite(total))
    throw NumericalError("Boltzmann weights underflowed at beta = " + std::to_string(beta));
  return w / total;
}

double canonical_average(const Eigen::VectorXd& energies, const Eigen::VectorXd& diagonal, double beta) {
  return canonical_weights(energies, beta).dot(diagonal);
}

double canonical_average(const EigenDecomposition& eig, const ObservableApply& observable, double beta) {
  return canonical_average(eig.energies, eigenbasis_diagonal(eig, observable), beta);
}

double canonical_energy(const Eigen::VectorXd& energies, double beta) {
  return canonical_average(energies, energies, beta);
}

double match_temperature(const EigenDecomposition& eig, double e_target) {
  const double e_min = eig.energies[0];
  const double e_max = eig.energies[eig.dim() - 1];
  if (!(e_target > e_min && e_target < e_max))
    throw DomainError("target energy " + std::to_string(e_target) + " outside the open interval (" +
                      std::to_string(e_min) + ", " + std::to_string(e_max) + ")");
  const double width = e_max - e_min;
  const double cap = 1e3 / width;
  // <H>_beta decreases monotonically in beta
  double lo = -cap;
  double hi = cap;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double e = canonical_energy(eig.energies, mid);
    if (std::abs(e - e_target) <= 1e-12 * width) return mid;
    if (e > e_target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-16 * cap) break;
  }
  return 0.5 * (lo + hi);
}

double default_half_width(const EigenDecomposition& eig) { return 0.025 * eig.spectral_width(); }

Eigen::Index microcanonical_count(const EigenDecomposition& eig, double center, double half_width) {
  return ((eig.energies.array() - center).abs() <= half_width).count();
}

double microcanonical_average(const Eigen::VectorXd& energies, const Eigen::VectorXd& diagonal,
                              double center, double half_width) {
  double sum = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index a = 0; a < energies.size(); ++a) {
    if (std::abs(energies[a] - center) > half_width) continue;
    sum += diagonal[a];
    ++count;
  }
  if (count == 0) {
    Eigen::Index nearest;
    (energies.array() - center).abs().minCoeff(&nearest);
    throw DomainError("empty microcanonical window around " + std::to_string(center) +
                      "; nearest eigenvalue is " + std::to_string(energies[nearest]));
  }
  return sum / static_cast<double>(count);
}

double microcanonical_average(const EigenDecomposition& eig, const ObservableApply& observable,
                              double center, double half_width) {
  // fail before the O(D^2) diagonal pass if the window is empty
  if (microcanonical_count(eig, center, half_width) == 0)
    return microcanonical_average(eig.energies, Eigen::VectorXd::Zero(eig.dim()), center, half_width);
  return microcanonical_average(eig.energies, eigenbasis_diagonal(eig, observable), center, half_width);
}

EthReport eth_fluctuation_report(const SpectralState& spectral, const DirectionField& dirs) {
  const EigenDecomposition& eig = spectral.decomposition();
  const int n = dirs.n_sites();
  if (n != eig.n_sites) throw ValidationError("direction field and Hamiltonian sizes differ");

  // Diagonal ensemble side, grouped by degenerate level.
  const Eigen::MatrixXcd phi = level_projections(spectral);
  Eigen::MatrixXcd a_phi(phi.rows(), phi.cols());
  for (Eigen::Index g = 0; g < phi.cols(); ++g) a_phi.col(g) = apply_macroscopic(dirs, phi.col(g));
  const Eigen::MatrixXcd overlaps = phi.adjoint() * a_phi;
  const double avg_a = overlaps.diagonal().real().sum();
  const double avg_a2 = a_phi.colwise().squaredNorm().sum();
  const double fluct = overlaps.cwiseAbs2().sum() - overlaps.diagonal().cwiseAbs2().sum();

  // Thermal side.
  Eigen::VectorXd diag_a(eig.dim());
  Eigen::VectorXd diag_a2(eig.dim());
  for (Eigen::Index a = 0; a < eig.dim(); ++a) {
    const Eigen::VectorXcd v = eig.vectors.col(a).cast<cplx>();
    const Eigen::VectorXcd av = apply_macroscopic(dirs, v);
    diag_a[a] = v.dot(av).real();
    diag_a2[a] = av.squaredNorm();
  }

  EthReport r;
  r.mean_energy = spectral.mean_energy();
  r.beta = match_temperature(eig, r.mean_energy);
  const Eigen::VectorXd w = canonical_weights(eig.energies, r.beta);
  const double thermal_a = w.dot(diag_a);
  r.thermal_variance = w.dot(diag_a2) - thermal_a * thermal_a;
  r.temporal_fluctuation = fluct;
  r.time_averaged_variance = avg_a2 - avg_a * avg_a - fluct;
  r.difference = r.time_averaged_variance - r.thermal_variance;
  r.difference_over_n = r.difference / n;
  r.difference_over_n2 = r.difference / (static_cast<double>(n) * n);
  return r;
}

}  // namespace macrospin
