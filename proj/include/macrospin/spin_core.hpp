#pragma once

// Pauli algebra on dense 2^N state vectors.
//
// Basis convention: computational z-basis, site 0 is the most significant
// bit of the basis index, and spin up maps to bit 0. So for N = 2 the index
// order is |up up>, |up down>, |down up>, |down down>.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "macrospin/rng.hpp"

namespace macrospin {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat2c = Eigen::Matrix2cd;

inline constexpr int kDefaultMaxSites = 14;

// Tolerance on |psi| accepted when wrapping amplitudes into a StateVector.
// Generated states meet 1e-12; evolved states are allowed slightly more.
inline constexpr double kNormTolerance = 1e-10;

enum class Axis : int { x = 0, y = 1, z = 2 };

inline constexpr Axis kAxes[3] = {Axis::x, Axis::y, Axis::z};

inline std::uint64_t site_mask(int n_sites, int site) {
  return std::uint64_t{1} << (n_sites - 1 - site);
}

// Normalized pure state of N spin-1/2 sites.
class StateVector {
 public:
  // Throws ValidationError if the length is not 2^n_sites or the norm is off
  // by more than kNormTolerance.
  StateVector(Eigen::VectorXcd amplitudes, int n_sites);

  // Rescales to unit norm first. Throws ValidationError on a zero vector.
  static StateVector normalized(Eigen::VectorXcd amplitudes, int n_sites);
  static StateVector basis_state(int n_sites, std::uint64_t index);

  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  int n_sites() const noexcept { return n_sites_; }
  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  cplx operator[](Eigen::Index k) const { return amplitudes_[k]; }

 private:
  Eigen::VectorXcd amplitudes_;
  int n_sites_;
};

// One unit 3-vector per site; defines A = sum_i alpha_i . sigma^(i).
class DirectionField {
 public:
  // Throws ValidationError if any |alpha_i| deviates from 1 by more than 1e-12.
  explicit DirectionField(std::vector<Vec3> directions);

  static DirectionField uniform(int n_sites, const Vec3& direction);
  // Normalizes each block; zero blocks are rejected.
  static DirectionField normalized(std::vector<Vec3> directions);

  int n_sites() const noexcept { return static_cast<int>(dirs_.size()); }
  const Vec3& operator[](int i) const { return dirs_[static_cast<std::size_t>(i)]; }
  const std::vector<Vec3>& directions() const noexcept { return dirs_; }
  // Stacked 3N vector (alpha_0, alpha_1, ...).
  Eigen::VectorXd flat() const;

 private:
  std::vector<Vec3> dirs_;
};

// Connected two-point correlation matrix of all single-site Pauli operators.
// blocks((i,a),(j,b)) = <s_a^i s_b^j> - m_i^a m_j^b for i != j, and the
// diagonal 3x3 block i is I - m_i m_i^T. Then V_A = alpha^T C alpha.
struct CorrelationMatrix {
  Eigen::MatrixXd blocks;
  std::vector<Vec3> mean_spins;

  int n_sites() const noexcept { return static_cast<int>(mean_spins.size()); }
  Eigen::Matrix3d block(int i, int j) const { return blocks.block<3, 3>(3 * i, 3 * j); }
};

// sigma_axis^(site)|psi>. Throws IndexError for site outside [0, N).
StateVector apply_pauli(const StateVector& state, int site, Axis axis);

// Raw-span form used by the kernels: out = sigma_axis^(site) in.
void apply_pauli_into(std::span<const cplx> in, std::span<cplx> out, int n_sites, int site,
                      Axis axis);

// Applies a 2x2 matrix on one site in place.
void apply_local_unitary(Eigen::VectorXcd& amplitudes, int n_sites, int site, const Mat2c& u);

// out = A in with A = sum_i alpha_i . sigma^(i).
Eigen::VectorXcd apply_macroscopic(const DirectionField& dirs, const Eigen::VectorXcd& in);

// Builds C from 3N partial vectors and their pairwise overlaps.
// Throws ValidationError for a non-normalized amplitude vector.
CorrelationMatrix correlation_matrix(const StateVector& state);
CorrelationMatrix correlation_matrix(std::span<const cplx> amplitudes, int n_sites);

// (|up...up> + |down...down>)/sqrt(2). Throws CapacityError if N > max_sites.
StateVector ghz(int n_sites, int max_sites = kDefaultMaxSites);

// Haar-random SU(2) element, phi and xi uniform on [0, 2pi), chi uniform on
// [0, 1], theta = arcsin(sqrt(chi)).
Mat2c random_su2(Rng& rng);
Mat2c su2_from_parameters(double phi, double xi, double chi);

// U_1 (x) ... (x) U_N |GHZ_N> with independent random_su2 factors.
StateVector random_ghz(int n_sites, Rng& rng, int max_sites = kDefaultMaxSites);
// Same with caller-provided local unitaries (one per site).
StateVector local_rotated_ghz(std::span<const Mat2c> unitaries, int max_sites = kDefaultMaxSites);

// Bloch vector of u|up>, the direction along which u maps sigma_z.
Vec3 rotated_z_axis(const Mat2c& u);

// exp(-i sigma_y theta/2)^{(x)N} (|up down up down ...> + |down up down up ...>)/sqrt(2).
// Throws ValidationError for odd N or theta outside [0, pi].
StateVector rotated_neel_ghz(int n_sites, double theta, int max_sites = kDefaultMaxSites);

// |phi>^{(x)N} for a single-site state phi (normalized internally).
StateVector product_state(int n_sites, const Eigen::Vector2cd& phi,
                          int max_sites = kDefaultMaxSites);

// <psi|O|psi> for a state-to-state observable.
using ObservableApply = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;
double expectation(const Eigen::VectorXcd& psi, const ObservableApply& observable);

ObservableApply pauli_observable(int n_sites, int site, Axis axis);
ObservableApply macroscopic_observable(const DirectionField& dirs);

// Fixture format: uint32 N (little endian) followed by 2^N interleaved
// (re, im) little-endian float64 pairs.
void write_state(std::ostream& out, const StateVector& state);
StateVector read_state(std::istream& in);

}  // namespace macrospin
