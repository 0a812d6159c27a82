#pragma once

// Disordered XXZ chains with a transverse field,
//   H = sum_i J_perp (s_x^i s_x^{i+1} + s_y^i s_y^{i+1}) + J_z s_z^i s_z^{i+1}
//       + h_i s_z^i + Gamma s_x^i,     s = sigma/2,
// with h_i uniform on [-h, h]. Every coupling is real, so the dense matrix is
// real symmetric in the computational basis and stored as such.

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "macrospin/spin_core.hpp"

namespace macrospin {

enum class Boundary { periodic, open };

struct ModelParams {
  int n_sites = 2;
  double j_perp = 1.0;
  double j_z = 1.0;
  double h_strength = 0.0;
  double gamma = 0.0;
  Boundary boundary = Boundary::periodic;

  // Throws ValidationError for h < 0 or N < 2.
  void validate() const;
};

struct DisorderRealization {
  std::vector<double> fields;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

struct Hamiltonian {
  Eigen::MatrixXd matrix;
  ModelParams params;
  DisorderRealization realization;
  std::vector<std::string> warnings;

  int n_sites() const noexcept { return params.n_sites; }
};

// Fields are i.i.d. uniform on [-h, h] from a generator seeded with
// derive_seed(master_seed, Stream::disorder, {realization_index}).
DisorderRealization sample_disorder(const ModelParams& params, std::uint64_t master_seed,
                                    std::uint64_t realization_index);

// Throws CapacityError above max_sites, ValidationError on inconsistent sizes.
// A periodic N = 2 chain counts its single bond twice and records a warning.
Hamiltonian build_xxz(const ModelParams& params, const DisorderRealization& realization,
                      int max_sites = kDefaultMaxSites);

enum class Preset {
  heisenberg,   // J_perp = J_z = 1, Gamma = 0.1, periodic
  xx_anderson,  // J_perp = 1, J_z = 0, Gamma = 0, periodic
};

Preset parse_preset(std::string_view name);
std::string_view to_string(Preset preset);
Boundary parse_boundary(std::string_view name);
std::string_view to_string(Boundary boundary);

ModelParams preset_params(Preset preset, int n_sites, double h_strength);

Hamiltonian build_preset_model(Preset preset, int n_sites, double h_strength,
                               std::uint64_t master_seed, std::uint64_t realization_index,
                               int max_sites = kDefaultMaxSites);

// J_z = sum_i sigma_z^(i) as a diagonal vector in the computational basis.
Eigen::VectorXd total_sz_diagonal(int n_sites);

}  // namespace macrospin
