#include "macrospin/lbits.hpp"

#include <cmath>
#include <string>

#include "macrospin/errors.hpp"
#include "macrospin/kernels.hpp"
#include "macrospin/macroscopicity.hpp"

namespace macrospin {

LbitModel generate_lbit_model(int n_sites, double xi2, double energy_scale,
                              double coupling_scale, std::uint64_t seed) {
  if (n_sites < 1) throw ValidationError("l-bit model needs at least one site");
  if (!(xi2 > 0.0)) throw ValidationError("localization length xi2 must be positive");
  LbitModel m;
  m.n_sites = n_sites;
  m.xi2 = xi2;
  m.seed = seed;
  m.onsite.resize(n_sites);
  m.pair_couplings = Eigen::MatrixXd::Zero(n_sites, n_sites);
  Rng rng(derive_seed(seed, Stream::lbit));
  for (int i = 0; i < n_sites; ++i) m.onsite[i] = uniform(rng, -energy_scale, energy_scale);
  for (int i = 0; i < n_sites; ++i) {
    for (int j = i + 1; j < n_sites; ++j) {
      const double u = uniform(rng, -1.0, 1.0);
      const double v = u * coupling_scale * std::exp(-static_cast<double>(j - i) / xi2);
      m.pair_couplings(i, j) = v;
      m.pair_couplings(j, i) = v;
    }
  }
  return m;
}

Eigen::VectorXd lbit_energy_table(const LbitModel& model) {
  if (model.onsite.size() != model.n_sites || model.pair_couplings.rows() != model.n_sites ||
      model.pair_couplings.cols() != model.n_sites)
    throw ValidationError("l-bit model arrays do not match n_sites");
  Eigen::VectorXd table = kernels::omp::lbit_energies({&model.onsite, &model.pair_couplings});
  const int n = model.n_sites;
  for (const ThreeBodyTerm& term : model.three_body) {
    for (Eigen::Index k = 0; k < table.size(); ++k) {
      const auto b = static_cast<std::uint64_t>(k);
      const double z = ((b & site_mask(n, term.i)) ? -1.0 : 1.0) *
                       ((b & site_mask(n, term.j)) ? -1.0 : 1.0) *
                       ((b & site_mask(n, term.k)) ? -1.0 : 1.0);
      table[k] += term.strength * z;
    }
  }
  return table;
}

StateVector lbit_evolve(const Eigen::VectorXd& energy_table, const StateVector& state, double t) {
  if (energy_table.size() != state.dim()) throw ValidationError("model and state sizes differ");
  Eigen::VectorXcd amps(state.dim());
  for (Eigen::Index k = 0; k < state.dim(); ++k)
    amps[k] = state[k] * std::polar(1.0, -energy_table[k] * t);
  return StateVector(std::move(amps), state.n_sites());
}

StateVector lbit_evolve(const LbitModel& model, const StateVector& state, double t) {
  if (model.n_sites != state.n_sites()) throw ValidationError("model and state sizes differ");
  return lbit_evolve(lbit_energy_table(model), state, t);
}

std::vector<StateVector> lbit_evolve_grid(const LbitModel& model, const StateVector& state,
                                          std::span<const double> times) {
  if (model.n_sites != state.n_sites()) throw ValidationError("model and state sizes differ");
  const Eigen::VectorXd table = lbit_energy_table(model);
  std::vector<StateVector> out(times.size(), state);
  const auto n_times = static_cast<std::ptrdiff_t>(times.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n_times; ++k)
    out[static_cast<std::size_t>(k)] = lbit_evolve(table, state, times[static_cast<std::size_t>(k)]);
  return out;
}

LbitAxes LbitAxes::from_betas(std::vector<Vec3> betas) {
  LbitAxes axes;
  axes.c = 1.0;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    const double norm = betas[i].norm();
    if (norm > 1.0 + 1e-12)
      throw ValidationError("|beta_" + std::to_string(i) + "| exceeds 1");
    if (!(norm > 0.0)) throw ValidationError("beta_" + std::to_string(i) + " vanishes");
    axes.c = std::min(axes.c, norm * norm);
  }
  axes.betas = std::move(betas);
  return axes;
}

LbitAxes LbitAxes::z_aligned(int n_sites) {
  return from_betas(std::vector<Vec3>(static_cast<std::size_t>(n_sites), Vec3::UnitZ()));
}

std::vector<Vec3> LbitAxes::unit_axes() const {
  std::vector<Vec3> out;
  out.reserve(betas.size());
  for (const Vec3& b : betas) out.push_back(b.normalized());
  return out;
}

double macroscopicity_lower_bound(const LbitAxes& axes, const StateVector& psi0) {
  if (static_cast<int>(axes.betas.size()) != psi0.n_sites())
    throw ValidationError("need one l-bit axis per site");
  const CorrelationMatrix c = correlation_matrix(psi0);
  const std::vector<Vec3> unit = axes.unit_axes();
  const SignSearch search =
      psi0.n_sites() > kMaxSignEnumerationSites ? SignSearch::greedy : SignSearch::exact;
  return axes.c * axes.c * max_signed_variance(c, unit, search).value;
}

}  // namespace macrospin
