#include "macrospin/kernels.hpp"

#include <cassert>
#include <cmath>

namespace macrospin::kernels {

namespace {

using Index = Eigen::Index;

inline double zsign(std::uint64_t k, std::uint64_t mask) { return (k & mask) ? -1.0 : 1.0; }

void fill_partial(std::span<const cplx> psi, int n_sites, int column, Eigen::MatrixXcd& partials) {
  const int site = column / 3;
  const auto axis = static_cast<Axis>(column % 3);
  apply_pauli_into(psi, {partials.col(column).data(), psi.size()}, n_sites, site, axis);
}

CorrelationMatrix assemble(const Eigen::VectorXd& means, Eigen::MatrixXd blocks, int n_sites) {
  CorrelationMatrix out;
  out.mean_spins.resize(static_cast<std::size_t>(n_sites));
  for (int i = 0; i < n_sites; ++i) {
    const Vec3 m = means.segment<3>(3 * i);
    out.mean_spins[static_cast<std::size_t>(i)] = m;
    blocks.block<3, 3>(3 * i, 3 * i) = Eigen::Matrix3d::Identity() - m * m.transpose();
  }
  out.blocks = std::move(blocks);
  return out;
}

// Connected correlator for columns p < q on different sites.
inline double connected(const Eigen::MatrixXcd& partials, const Eigen::VectorXd& means, int p,
                        int q) {
  const cplx raw = partials.col(p).dot(partials.col(q));
  // sigma_a^(i) and sigma_b^(j) commute for i != j, so the overlap is real.
  assert(std::abs(raw.imag()) < 1e-10);
  return raw.real() - means[p] * means[q];
}

double lbit_energy(const LbitCouplings& c, std::uint64_t k) {
  const Eigen::VectorXd& e = *c.onsite;
  const Eigen::MatrixXd& v = *c.pair;
  const int n = static_cast<int>(e.size());
  double energy = 0.0;
  for (int i = 0; i < n; ++i) {
    const double zi = zsign(k, site_mask(n, i));
    energy += e[i] * zi;
    for (int j = i + 1; j < n; ++j) energy += 2.0 * v(i, j) * zi * zsign(k, site_mask(n, j));
  }
  return energy;
}

void fill_xxz_column(const XxzCouplings& c, std::span<const double> fields, std::uint64_t k,
                     Eigen::MatrixXd& h) {
  const int n = c.n_sites;
  const auto col = static_cast<Index>(k);
  double diag = 0.0;
  const int n_bonds = c.periodic ? n : n - 1;
  for (int b = 0; b < n_bonds; ++b) {
    const std::uint64_t mi = site_mask(n, b);
    const std::uint64_t mj = site_mask(n, (b + 1) % n);
    const double zi = zsign(k, mi);
    const double zj = zsign(k, mj);
    diag += 0.25 * c.j_z * zi * zj;
    // s_x s_x + s_y s_y = (s+ s- + s- s+)/2 flips antiparallel pairs with amplitude 1/2
    if (zi != zj) h(static_cast<Index>(k ^ mi ^ mj), col) += 0.5 * c.j_perp;
  }
  for (int i = 0; i < n; ++i) {
    const std::uint64_t mi = site_mask(n, i);
    diag += 0.5 * fields[static_cast<std::size_t>(i)] * zsign(k, mi);
    if (c.gamma != 0.0) h(static_cast<Index>(k ^ mi), col) += 0.5 * c.gamma;
  }
  h(col, col) += diag;
}

Eigen::VectorXcd phased(const Eigen::VectorXd& energies, const Eigen::VectorXcd& coeffs, double t) {
  Eigen::VectorXcd out(coeffs.size());
  for (Index a = 0; a < coeffs.size(); ++a) out[a] = coeffs[a] * std::polar(1.0, -energies[a] * t);
  return out;
}

void evolve_column(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& energies,
                   const Eigen::VectorXcd& coeffs, double t, Eigen::MatrixXcd& out, Index col) {
  const Eigen::VectorXcd c = phased(energies, coeffs, t);
  const Eigen::VectorXd re = vectors * c.real();
  const Eigen::VectorXd im = vectors * c.imag();
  for (Index k = 0; k < re.size(); ++k) out(k, col) = cplx(re[k], im[k]);
}

}  // namespace

namespace serial {

Eigen::MatrixXcd pauli_partials(std::span<const cplx> psi, int n_sites) {
  Eigen::MatrixXcd partials(static_cast<Index>(psi.size()), 3 * n_sites);
  for (int c = 0; c < 3 * n_sites; ++c) fill_partial(psi, n_sites, c, partials);
  return partials;
}

CorrelationMatrix correlation_matrix(std::span<const cplx> psi, int n_sites) {
  const Eigen::MatrixXcd partials = pauli_partials(psi, n_sites);
  const Eigen::Map<const Eigen::VectorXcd> state(psi.data(), static_cast<Index>(psi.size()));
  const int width = 3 * n_sites;
  Eigen::VectorXd means(width);
  for (int c = 0; c < width; ++c) means[c] = state.dot(partials.col(c)).real();
  Eigen::MatrixXd blocks = Eigen::MatrixXd::Zero(width, width);
  for (int p = 0; p < width; ++p) {
    for (int q = 3 * (p / 3 + 1); q < width; ++q) {
      const double v = connected(partials, means, p, q);
      blocks(p, q) = v;
      blocks(q, p) = v;
    }
  }
  return assemble(means, std::move(blocks), n_sites);
}

Eigen::MatrixXd xxz_matrix(const XxzCouplings& c, std::span<const double> fields) {
  const std::uint64_t dim = std::uint64_t{1} << c.n_sites;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  for (std::uint64_t k = 0; k < dim; ++k) fill_xxz_column(c, fields, k, h);
  return h;
}

Eigen::MatrixXcd evolve_grid(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& energies,
                             const Eigen::VectorXcd& coeffs, std::span<const double> times) {
  Eigen::MatrixXcd out(vectors.rows(), static_cast<Index>(times.size()));
  for (std::size_t k = 0; k < times.size(); ++k)
    evolve_column(vectors, energies, coeffs, times[k], out, static_cast<Index>(k));
  return out;
}

Eigen::VectorXd lbit_energies(const LbitCouplings& c) {
  const std::uint64_t dim = std::uint64_t{1} << c.onsite->size();
  Eigen::VectorXd out(static_cast<Index>(dim));
  for (std::uint64_t k = 0; k < dim; ++k) out[static_cast<Index>(k)] = lbit_energy(c, k);
  return out;
}

}  // namespace serial

namespace omp {

Eigen::MatrixXcd pauli_partials(std::span<const cplx> psi, int n_sites) {
  Eigen::MatrixXcd partials(static_cast<Index>(psi.size()), 3 * n_sites);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < 3 * n_sites; ++c) fill_partial(psi, n_sites, c, partials);
  return partials;
}

CorrelationMatrix correlation_matrix(std::span<const cplx> psi, int n_sites) {
  const Eigen::MatrixXcd partials = pauli_partials(psi, n_sites);
  const Eigen::Map<const Eigen::VectorXcd> state(psi.data(), static_cast<Index>(psi.size()));
  const int width = 3 * n_sites;
  Eigen::VectorXd means(width);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < width; ++c) means[c] = state.dot(partials.col(c)).real();
  Eigen::MatrixXd blocks = Eigen::MatrixXd::Zero(width, width);
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < width; ++p) {
    for (int q = 3 * (p / 3 + 1); q < width; ++q) {
      const double v = connected(partials, means, p, q);
      blocks(p, q) = v;
      blocks(q, p) = v;
    }
  }
  return assemble(means, std::move(blocks), n_sites);
}

Eigen::MatrixXd xxz_matrix(const XxzCouplings& c, std::span<const double> fields) {
  const std::uint64_t dim = std::uint64_t{1} << c.n_sites;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Index>(dim), static_cast<Index>(dim));
  // each iteration writes only column k
#pragma omp parallel for schedule(static)
  for (std::uint64_t k = 0; k < dim; ++k) fill_xxz_column(c, fields, k, h);
  return h;
}

Eigen::MatrixXcd evolve_grid(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& energies,
                             const Eigen::VectorXcd& coeffs, std::span<const double> times) {
  Eigen::MatrixXcd out(vectors.rows(), static_cast<Index>(times.size()));
  const auto n_times = static_cast<std::ptrdiff_t>(times.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n_times; ++k)
    evolve_column(vectors, energies, coeffs, times[static_cast<std::size_t>(k)], out,
                  static_cast<Index>(k));
  return out;
}

Eigen::VectorXd lbit_energies(const LbitCouplings& c) {
  const std::uint64_t dim = std::uint64_t{1} << c.onsite->size();
  Eigen::VectorXd out(static_cast<Index>(dim));
#pragma omp parallel for schedule(static)
  for (std::uint64_t k = 0; k < dim; ++k) out[static_cast<Index>(k)] = lbit_energy(c, k);
  return out;
}

}  // namespace omp

}  // namespace macrospin::kernels
