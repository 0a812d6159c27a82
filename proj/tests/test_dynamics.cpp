#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "macrospin/dynamics.hpp"
#include "macrospin/errors.hpp"
#include "oracles.hpp"

using namespace macrospin;

namespace {

std::shared_ptr<const EigenDecomposition> heisenberg(int n, double h, std::uint64_t seed) {
  return std::make_shared<const EigenDecomposition>(
      diagonalize(build_preset_model(Preset::heisenberg, n, h, seed, 0)));
}

StateVector random_ghz_state(int n, std::uint64_t seed) {
  Rng rng(seed);
  return random_ghz(n, rng);
}

// <O> at time t via a dense matrix exponential of the Kronecker-built H.
double dense_expectation(const oracle::Mat& H, const Eigen::VectorXcd& psi0, const oracle::Mat& op,
                         double t) {
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(H);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<oracle::cplx>() * oracle::cplx(0, -t)).array().exp();
  const Eigen::VectorXcd psi = es.eigenvectors() * phases.asDiagonal() *
                               (es.eigenvectors().adjoint() * psi0);
  return oracle::expect(psi, op);
}

}  // namespace

TEST(Diagonalize, AscendingResidualOrthonormal) {
  const Hamiltonian h = build_preset_model(Preset::heisenberg, 8, 1.5, 3, 0);
  const EigenDecomposition eig = diagonalize(h);
  for (Eigen::Index a = 1; a < eig.dim(); ++a) EXPECT_LE(eig.energies[a - 1], eig.energies[a]);
  const double norm = eig.operator_norm();
  for (Eigen::Index a = 0; a < eig.dim(); ++a)
    EXPECT_LE((h.matrix * eig.vectors.col(a) - eig.energies[a] * eig.vectors.col(a)).norm(),
              1e-9 * norm);
  const Eigen::MatrixXd gram = eig.vectors.transpose() * eig.vectors;
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(eig.dim(), eig.dim())).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Diagonalize, RejectsAsymmetric) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
  m(0, 1) = 1.0;
  EXPECT_THROW(diagonalize(m, 2), ValidationError);
  EXPECT_THROW(diagonalize(Eigen::MatrixXd::Zero(3, 3), 2), ValidationError);
}

TEST(Evolve, PreservesNormAndEnergy) {
  const Hamiltonian h = build_preset_model(Preset::heisenberg, 8, 1.0, 4, 0);
  const auto eig = std::make_shared<const EigenDecomposition>(diagonalize(h));
  const SpectralState s(eig, random_ghz_state(8, 1));
  const double e0 = s.mean_energy();
  for (double t : {0.0, 0.7, 55.0, 1e4}) {
    const StateVector psi = evolve(s, t);
    EXPECT_NEAR(psi.amplitudes().norm(), 1.0, 1e-10);
    const double e = psi.amplitudes().dot(h.matrix.cast<cplx>() * psi.amplitudes()).real();
    EXPECT_NEAR(e, e0, 1e-9 * eig->operator_norm());
  }
}

TEST(Evolve, MatchesDenseExponentialOracle) {
  const Hamiltonian h = build_preset_model(Preset::heisenberg, 4, 2.0, 8, 1);
  const auto eig = std::make_shared<const EigenDecomposition>(diagonalize(h));
  const StateVector psi0 = random_ghz_state(4, 2);
  const SpectralState s(eig, psi0);
  const oracle::Mat H =
      oracle::xxz(4, 1, 1, h.realization.fields, 0.1, true);
  const oracle::Mat op = oracle::site_pauli(2, 0, 4);
  for (double t : {0.3, 4.0, 123.0}) {
    const double ref = dense_expectation(H, psi0.amplitudes(), op, t);
    EXPECT_NEAR(expectation(evolve(s, t).amplitudes(), pauli_observable(4, 2, Axis::x)), ref, 1e-10);
  }
}

TEST(Evolve, GridMatchesSingleTimes) {
  const auto eig = heisenberg(6, 1.0, 2);
  const SpectralState s(eig, random_ghz_state(6, 3));
  const std::vector<double> times = {0.1, 2.0, 30.0};
  const auto grid = evolve_grid(s, times);
  for (std::size_t k = 0; k < times.size(); ++k)
    EXPECT_LT((grid[k].amplitudes() - evolve(s, times[k]).amplitudes()).norm(), 1e-12);
}

TEST(DiagonalEnsemble, MatchesSampledTimeAverage) {
  const auto eig = heisenberg(6, 1.0, 11);
  const SpectralState s(eig, random_ghz_state(6, 12));
  const ObservableApply obs = macroscopic_observable(DirectionField::uniform(6, Vec3::UnitZ()));
  const double de = diagonal_ensemble_average(s, obs) / 6.0;
  Rng rng(13);
  double sum = 0.0;
  const int samples = 2000;
  for (int k = 0; k < samples; ++k) sum += expectation(evolve(s, uniform(rng, 1e3, 1e6)).amplitudes(), obs);
  EXPECT_NEAR(sum / samples / 6.0, de, 5e-3);
}

TEST(TemporalFluctuation, TwoLevelClosedForm) {
  // H = diag(-1, 1) on one site with psi = cos(a)|0> + sin(a)|1> and O = sigma_x:
  // <O(t)> = sin(2a) cos(2t), whose time variance is sin^2(2a)/2.
  Eigen::MatrixXd H(2, 2);
  H << -1, 0, 0, 1;
  const auto eig = std::make_shared<const EigenDecomposition>(diagonalize(H, 1));
  const double a = 0.3;
  Eigen::VectorXcd amp(2);
  amp << std::cos(a), std::sin(a);
  const SpectralState s(eig, StateVector(amp, 1));
  const ObservableApply sx = pauli_observable(1, 0, Axis::x);
  EXPECT_NEAR(temporal_fluctuation(s, sx), 0.5 * std::pow(std::sin(2 * a), 2), 1e-14);
  EXPECT_NEAR(diagonal_ensemble_average(s, sx), 0.0, 1e-14);
  const ObservableApply sz = pauli_observable(1, 0, Axis::z);
  EXPECT_NEAR(diagonal_ensemble_average(s, sz), std::cos(2 * a), 1e-14);
  EXPECT_NEAR(temporal_fluctuation(s, sz), 0.0, 1e-14);
}

TEST(TemporalFluctuation, DegenerateLevelHasNoFluctuation) {
  // A doubly degenerate level: <O(t)> is constant.
  const Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2, 2);
  const auto eig = std::make_shared<const EigenDecomposition>(diagonalize(H, 1));
  Eigen::VectorXcd amp(2);
  amp << std::sqrt(0.5), std::sqrt(0.5);
  const SpectralState s(eig, StateVector(amp, 1));
  const ObservableApply sx = pauli_observable(1, 0, Axis::x);
  EXPECT_NEAR(temporal_fluctuation(s, sx), 0.0, 1e-14);
  EXPECT_NEAR(diagonal_ensemble_average(s, sx), 1.0, 1e-14);
}

// J_z is conserved up to the weak transverse field, so its fluctuations are
// suppressed in the localized phase; transverse magnetization is the
// observable that separates the phases.
TEST(TemporalFluctuation, ThermalSmallerThanLocalized) {
  auto fluct = [&](double h, const Vec3& axis) {
    double sum = 0.0;
    for (std::uint64_t r = 0; r < 3; ++r) {
      const auto eig = std::make_shared<const EigenDecomposition>(
          diagonalize(build_preset_model(Preset::heisenberg, 10, h, 21, r)));
      const SpectralState s(eig, random_ghz_state(10, 40 + r));
      sum += temporal_fluctuation(s, macroscopic_observable(DirectionField::uniform(10, axis))) / 100.0;
    }
    return sum;
  };
  EXPECT_LT(fluct(0.5, Vec3::UnitX()), fluct(5.0, Vec3::UnitX()));
  EXPECT_GT(fluct(0.5, Vec3::UnitZ()), fluct(5.0, Vec3::UnitZ()));
}

TEST(TemporalFluctuation, ThermalShrinksWithSize) {
  auto fluct = [&](int n) {
    const auto eig = std::make_shared<const EigenDecomposition>(
        diagonalize(build_preset_model(Preset::heisenberg, n, 0.5, 21, 0)));
    const SpectralState s(eig, random_ghz_state(n, 40));
    return temporal_fluctuation(s, macroscopic_observable(DirectionField::uniform(n, Vec3::UnitZ()))) /
           (n * n);
  };
  EXPECT_GT(fluct(6), fluct(8));
  EXPECT_GT(fluct(8), fluct(10));
}

TEST(Degeneracy, GroupsWithinTolerance) {
  Eigen::VectorXd e(5);
  e << -1.0, -1.0 + 1e-13, 0.0, 0.5, 0.5;
  const auto levels = degenerate_levels(e, 1e-10);
  EXPECT_EQ(levels, (std::vector<Eigen::Index>{0, 2, 3, 5}));
}

TEST(TimeGrid, LogSpacedSixtyPerDecade) {
  const std::vector<double> t = TimeGrid{}.times();
  ASSERT_EQ(t.size(), 301u);
  EXPECT_DOUBLE_EQ(t.front(), 0.1);
  EXPECT_NEAR(t.back(), 1e4, 1e-8);
  EXPECT_NEAR(std::log10(t[60] / t[0]), 1.0, 1e-12);
  int inside = 0;
  for (double x : t) inside += SaturationWindow{}.contains(x);
  EXPECT_EQ(inside, 61);
}

TEST(SaturatedMean, AveragesOnlyWindow) {
  const std::vector<double> t = {1.0, 1e3, 5e3, 1e4, 2e4};
  const std::vector<double> v = {100.0, 1.0, 2.0, 3.0, 100.0};
  EXPECT_DOUBLE_EQ(saturated_mean(t, v, {}), 2.0);
}
