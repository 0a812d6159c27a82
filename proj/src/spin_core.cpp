#include "macrospin/spin_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "macrospin/errors.hpp"
#include "macrospin/kernels.hpp"

namespace macrospin {

namespace {

void check_sites(int n_sites, int max_sites) {
  if (n_sites < 1) throw ValidationError("number of sites must be positive");
  if (n_sites > max_sites)
    throw CapacityError("N = " + std::to_string(n_sites) + " exceeds the maximum of " +
                        std::to_string(max_sites) + " sites");
}

void check_site(int n_sites, int site) {
  if (site < 0 || site >= n_sites)
    throw IndexError("site " + std::to_string(site) + " outside [0, " +
                     std::to_string(n_sites) + ")");
}

}  // namespace

StateVector::StateVector(Eigen::VectorXcd amplitudes, int n_sites)
    : amplitudes_(std::move(amplitudes)), n_sites_(n_sites) {
  if (n_sites < 1 || n_sites > 62) throw ValidationError("invalid number of sites");
  if (amplitudes_.size() != (Eigen::Index{1} << n_sites))
    throw ValidationError("state length " + std::to_string(amplitudes_.size()) +
                          " is not 2^" + std::to_string(n_sites));
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kNormTolerance)
    throw ValidationError("state is not normalized (|psi| = " + std::to_string(norm) + ")");
}

StateVector StateVector::normalized(Eigen::VectorXcd amplitudes, int n_sites) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw ValidationError("cannot normalize a zero vector");
  amplitudes /= norm;
  return StateVector(std::move(amplitudes), n_sites);
}

StateVector StateVector::basis_state(int n_sites, std::uint64_t index) {
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_sites);
  if (index >= static_cast<std::uint64_t>(amps.size())) throw IndexError("basis index out of range");
  amps[static_cast<Eigen::Index>(index)] = 1.0;
  return StateVector(std::move(amps), n_sites);
}

DirectionField::DirectionField(std::vector<Vec3> directions) : dirs_(std::move(directions)) {
  for (std::size_t i = 0; i < dirs_.size(); ++i) {
    if (std::abs(dirs_[i].norm() - 1.0) > 1e-12)
      throw ValidationError("direction " + std::to_string(i) + " is not a unit vector");
  }
}

DirectionField DirectionField::uniform(int n_sites, const Vec3& direction) {
  return DirectionField(std::vector<Vec3>(static_cast<std::size_t>(n_sites), direction.normalized()));
}

DirectionField DirectionField::normalized(std::vector<Vec3> directions) {
  for (auto& d : directions) {
    const double n = d.norm();
    if (!(n > 0.0)) throw ValidationError("zero direction cannot be normalized");
    d /= n;
  }
  return DirectionField(std::move(directions));
}

Eigen::VectorXd DirectionField::flat() const {
  Eigen::VectorXd out(3 * dirs_.size());
  for (std::size_t i = 0; i < dirs_.size(); ++i) out.segment<3>(3 * static_cast<Eigen::Index>(i)) = dirs_[i];
  return out;
}

void apply_pauli_into(std::span<const cplx> in, std::span<cplx> out, int n_sites, int site,
                      Axis axis) {
  check_site(n_sites, site);
  const std::uint64_t mask = site_mask(n_sites, site);
  const std::size_t dim = in.size();
  constexpr cplx i_unit{0.0, 1.0};
  switch (axis) {
    case Axis::x:
      for (std::size_t k = 0; k < dim; ++k) out[k] = in[k ^ mask];
      break;
    case Axis::y:
      // sigma_y|up> = i|down>, sigma_y|down> = -i|up>
      for (std::size_t k = 0; k < dim; ++k)
        out[k] = (k & mask ? i_unit : -i_unit) * in[k ^ mask];
      break;
    case Axis::z:
      for (std::size_t k = 0; k < dim; ++k) out[k] = (k & mask) ? -in[k] : in[k];
      break;
  }
}

StateVector apply_pauli(const StateVector& state, int site, Axis axis) {
  check_site(state.n_sites(), site);
  Eigen::VectorXcd out(state.dim());
  apply_pauli_into({state.amplitudes().data(), static_cast<std::size_t>(state.dim())},
                   {out.data(), static_cast<std::size_t>(out.size())}, state.n_sites(), site,
                   axis);
  return StateVector(std::move(out), state.n_sites());
}

void apply_local_unitary(Eigen::VectorXcd& amplitudes, int n_sites, int site, const Mat2c& u) {
  check_site(n_sites, site);
  const std::uint64_t mask = site_mask(n_sites, site);
  const auto dim = static_cast<std::uint64_t>(amplitudes.size());
  for (std::uint64_t k = 0; k < dim; ++k) {
    if (k & mask) continue;
    const cplx up = amplitudes[static_cast<Eigen::Index>(k)];
    const cplx down = amplitudes[static_cast<Eigen::Index>(k | mask)];
    amplitudes[static_cast<Eigen::Index>(k)] = u(0, 0) * up + u(0, 1) * down;
    amplitudes[static_cast<Eigen::Index>(k | mask)] = u(1, 0) * up + u(1, 1) * down;
  }
}

Eigen::VectorXcd apply_macroscopic(const DirectionField& dirs, const Eigen::VectorXcd& in) {
  const int n = dirs.n_sites();
  const auto dim = static_cast<std::uint64_t>(in.size());
  if (dim != (std::uint64_t{1} << n)) throw ValidationError("direction field size mismatch");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
  for (int i = 0; i < n; ++i) {
    const std::uint64_t mask = site_mask(n, i);
    const Vec3& a = dirs[i];
    // alpha . sigma = [[az, ax - i ay], [ax + i ay, -az]]
    const cplx lower{a.x(), a.y()};
    const cplx upper{a.x(), -a.y()};
    for (std::uint64_t k = 0; k < dim; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      const auto kf = static_cast<Eigen::Index>(k ^ mask);
      if (k & mask)
        out[kk] += lower * in[kf] - a.z() * in[kk];
      else
        out[kk] += a.z() * in[kk] + upper * in[kf];
    }
  }
  return out;
}

CorrelationMatrix correlation_matrix(std::span<const cplx> amplitudes, int n_sites) {
  if (amplitudes.size() != (std::size_t{1} << n_sites))
    throw ValidationError("amplitude vector length is not 2^N");
  double norm2 = 0.0;
  for (const cplx& c : amplitudes) norm2 += std::norm(c);
  if (std::abs(std::sqrt(norm2) - 1.0) > kNormTolerance)
    throw ValidationError("correlation matrix requires a normalized state");
  return kernels::omp::correlation_matrix(amplitudes, n_sites);
}

CorrelationMatrix correlation_matrix(const StateVector& state) {
  return kernels::omp::correlation_matrix(
      {state.amplitudes().data(), static_cast<std::size_t>(state.dim())}, state.n_sites());
}

StateVector ghz(int n_sites, int max_sites) {
  check_sites(n_sites, max_sites);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_sites);
  amps[0] = std::numbers::sqrt2 / 2.0;
  amps[amps.size() - 1] = std::numbers::sqrt2 / 2.0;
  return StateVector(std::move(amps), n_sites);
}

Mat2c su2_from_parameters(double phi, double xi, double chi) {
  const double theta = std::asin(std::sqrt(chi));
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2c u;
  u(0, 0) = std::polar(c, phi);
  u(0, 1) = std::polar(s, xi);
  u(1, 0) = -std::polar(s, -xi);
  u(1, 1) = std::polar(c, -phi);
  return u;
}

Mat2c random_su2(Rng& rng) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double phi = two_pi * uniform01(rng);
  const double xi = two_pi * uniform01(rng);
  const double chi = uniform01(rng);
  return su2_from_parameters(phi, xi, chi);
}

StateVector local_rotated_ghz(std::span<const Mat2c> unitaries, int max_sites) {
  const int n = static_cast<int>(unitaries.size());
  check_sites(n, max_sites);
  // U^{(x)N}|0...0> and U^{(x)N}|1...1> are product states; expand directly.
  const std::uint64_t dim = std::uint64_t{1} << n;
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(dim));
  for (std::uint64_t k = 0; k < dim; ++k) {
    cplx from_up{1.0, 0.0};
    cplx from_down{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
      const int bit = (k & site_mask(n, i)) ? 1 : 0;
      from_up *= unitaries[static_cast<std::size_t>(i)](bit, 0);
      from_down *= unitaries[static_cast<std::size_t>(i)](bit, 1);
    }
    amps[static_cast<Eigen::Index>(k)] = (from_up + from_down) * (std::numbers::sqrt2 / 2.0);
  }
  return StateVector(std::move(amps), n);
}

StateVector random_ghz(int n_sites, Rng& rng, int max_sites) {
  check_sites(n_sites, max_sites);
  std::vector<Mat2c> us;
  us.reserve(static_cast<std::size_t>(n_sites));
  for (int i = 0; i < n_sites; ++i) us.push_back(random_su2(rng));
  return local_rotated_ghz(us, max_sites);
}

Vec3 rotated_z_axis(const Mat2c& u) {
  const cplx a = u(0, 0);
  const cplx b = u(1, 0);
  // Bloch vector of a|up> + b|down>
  const cplx ab = std::conj(a) * b;
  return Vec3(2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b));
}

StateVector rotated_neel_ghz(int n_sites, double theta, int max_sites) {
  check_sites(n_sites, max_sites);
  if (n_sites % 2 != 0) throw ValidationError("rotated Neel GHZ state requires an even N");
  if (!(theta >= 0.0 && theta <= std::numbers::pi))
    throw ValidationError("theta must lie in [0, pi]");
  std::uint64_t neel = 0;
  for (int i = 1; i < n_sites; i += 2) neel |= site_mask(n_sites, i);
  const std::uint64_t anti = neel ^ ((std::uint64_t{1} << n_sites) - 1);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_sites);
  amps[static_cast<Eigen::Index>(neel)] = std::numbers::sqrt2 / 2.0;
  amps[static_cast<Eigen::Index>(anti)] = std::numbers::sqrt2 / 2.0;
  // exp(-i sigma_y theta/2) = [[cos, -sin], [sin, cos]](theta/2)
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  Mat2c u;
  u << c, -s, s, c;
  for (int i = 0; i < n_sites; ++i) apply_local_unitary(amps, n_sites, i, u);
  return StateVector::normalized(std::move(amps), n_sites);
}

StateVector product_state(int n_sites, const Eigen::Vector2cd& phi, int max_sites) {
  check_sites(n_sites, max_sites);
  const Eigen::Vector2cd p = phi.normalized();
  const std::uint64_t dim = std::uint64_t{1} << n_sites;
  Eigen::VectorXcd amps(static_cast<Eigen::Index>(dim));
  for (std::uint64_t k = 0; k < dim; ++k) {
    cplx a{1.0, 0.0};
    for (int i = 0; i < n_sites; ++i) a *= p[(k & site_mask(n_sites, i)) ? 1 : 0];
    amps[static_cast<Eigen::Index>(k)] = a;
  }
  return StateVector::normalized(std::move(amps), n_sites);
}

double expectation(const Eigen::VectorXcd& psi, const ObservableApply& observable) {
  return psi.dot(observable(psi)).real();
}

ObservableApply pauli_observable(int n_sites, int site, Axis axis) {
  check_site(n_sites, site);
  return [n_sites, site, axis](const Eigen::VectorXcd& in) {
    Eigen::VectorXcd out(in.size());
    apply_pauli_into({in.data(), static_cast<std::size_t>(in.size())},
                     {out.data(), static_cast<std::size_t>(out.size())}, n_sites, site, axis);
    return out;
  };
}

ObservableApply macroscopic_observable(const DirectionField& dirs) {
  return [dirs](const Eigen::VectorXcd& in) { return apply_macroscopic(dirs, in); };
}

namespace {

template <typename T>
void write_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw ValidationError("truncated state fixture");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_state(std::ostream& out, const StateVector& state) {
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(state.n_sites()));
  for (Eigen::Index k = 0; k < state.dim(); ++k) {
    write_le<double>(out, state[k].real());
    write_le<double>(out, state[k].imag());
  }
}

StateVector read_state(std::istream& in) {
  const auto n = read_le<std::uint32_t>(in);
  if (n < 1 || n > 30) throw ValidationError("state fixture has an implausible site count");
  Eigen::VectorXcd amps(Eigen::Index{1} << n);
  for (Eigen::Index k = 0; k < amps.size(); ++k) {
    const double re = read_le<double>(in);
    const double im = read_le<double>(in);
    amps[k] = cplx(re, im);
  }
  return StateVector(std::move(amps), static_cast<int>(n));
}

}  // namespace macrospin
