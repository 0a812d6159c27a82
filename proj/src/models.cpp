#include "macrospin/models.hpp"

#include "macrospin/errors.hpp"
#include "macrospin/kernels.hpp"
#include "macrospin/rng.hpp"

namespace macrospin {

void ModelParams::validate() const {
  if (n_sites < 2) throw ValidationError("a chain needs at least two sites");
  if (!(h_strength >= 0.0)) throw ValidationError("disorder strength must be non-negative");
}

DisorderRealization sample_disorder(const ModelParams& params, std::uint64_t master_seed,
                                    std::uint64_t realization_index) {
  DisorderRealization out;
  out.index = realization_index;
  out.seed = derive_seed(master_seed, Stream::disorder, {realization_index});
  out.fields.resize(static_cast<std::size_t>(params.n_sites));
  if (params.h_strength == 0.0) return out;
  Rng rng(out.seed);
  for (double& f : out.fields) f = uniform(rng, -params.h_strength, params.h_strength);
  return out;
}

Hamiltonian build_xxz(const ModelParams& params, const DisorderRealization& realization,
                      int max_sites) {
  params.validate();
  if (params.n_sites > max_sites)
    throw CapacityError("N = " + std::to_string(params.n_sites) + " exceeds the maximum of " +
                        std::to_string(max_sites) + " sites");
  if (realization.fields.size() != static_cast<std::size_t>(params.n_sites))
    throw ValidationError("disorder realization size does not match the chain");

  Hamiltonian h;
  h.params = params;
  h.realization = realization;
  kernels::XxzCouplings c{params.n_sites, params.j_perp, params.j_z, params.gamma,
                          params.boundary == Boundary::periodic};
  h.matrix = kernels::omp::xxz_matrix(c, realization.fields);
  if (params.n_sites == 2 && params.boundary == Boundary::periodic)
    h.warnings.emplace_back("periodic N=2 chain: the single bond is counted twice");
  return h;
}

Preset parse_preset(std::string_view name) {
  if (name == "heisenberg") return Preset::heisenberg;
  if (name == "xx_anderson") return Preset::xx_anderson;
  throw ValidationError("unknown model preset '" + std::string(name) + "'");
}

std::string_view to_string(Preset preset) {
  return preset == Preset::heisenberg ? "heisenberg" : "xx_anderson";
}

Boundary parse_boundary(std::string_view name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "open") return Boundary::open;
  throw ValidationError("unknown boundary '" + std::string(name) + "'");
}

std::string_view to_string(Boundary boundary) {
  return boundary == Boundary::periodic ? "periodic" : "open";
}

ModelParams preset_params(Preset preset, int n_sites, double h_strength) {
  ModelParams p;
  p.n_sites = n_sites;
  p.h_strength = h_strength;
  p.boundary = Boundary::periodic;
  switch (preset) {
    case Preset::heisenberg:
      p.j_perp = 1.0;
      p.j_z = 1.0;
      p.gamma = 0.1;
      break;
    case Preset::xx_anderson:
      p.j_perp = 1.0;
      p.j_z = 0.0;
      p.gamma = 0.0;
      break;
  }
  return p;
}

Hamiltonian build_preset_model(Preset preset, int n_sites, double h_strength,
                               std::uint64_t master_seed, std::uint64_t realization_index,
                               int max_sites) {
  const ModelParams p = preset_params(preset, n_sites, h_strength);
  return build_xxz(p, sample_disorder(p, master_seed, realization_index), max_sites);
}

Eigen::VectorXd total_sz_diagonal(int n_sites) {
  const std::uint64_t dim = std::uint64_t{1} << n_sites;
  Eigen::VectorXd out(static_cast<Eigen::Index>(dim));
  for (std::uint64_t k = 0; k < dim; ++k) {
    double s = 0.0;
    for (int i = 0; i < n_sites; ++i) s += (k & site_mask(n_sites, i)) ? -1.0 : 1.0;
    out[static_cast<Eigen::Index>(k)] = s;
  }
  return out;
}

}  // namespace macrospin
