#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "macrospin/errors.hpp"
#include "macrospin/thermal.hpp"

using namespace macrospin;

namespace {

std::shared_ptr<const EigenDecomposition> heisenberg(int n, double h, std::uint64_t seed,
                                                     std::uint64_t r = 0) {
  return std::make_shared<const EigenDecomposition>(
      diagonalize(build_preset_model(Preset::heisenberg, n, h, seed, r)));
}

}  // namespace

TEST(Canonical, TwoLevelClosedForm) {
  Eigen::VectorXd e(2);
  e << -1.0, 1.0;
  Eigen::VectorXd o(2);
  o << 1.0, -1.0;
  for (double beta : {0.0, 0.3, -2.0, 700.0}) {
    const double expected = std::tanh(beta);
    EXPECT_NEAR(canonical_average(e, o, beta), expected, 1e-14);
    EXPECT_NEAR(canonical_energy(e, beta), -expected, 1e-14);
  }
}

TEST(Canonical, LargeBetaDoesNotOverflow) {
  Eigen::VectorXd e(3);
  e << -500.0, 0.0, 500.0;
  const Eigen::VectorXd w = canonical_weights(e, 10.0);
  EXPECT_NEAR(w[0], 1.0, 1e-15);
  EXPECT_TRUE(std::isfinite(w.sum()));
}

TEST(MatchTemperature, HitsTargetEnergy) {
  const auto eig = heisenberg(8, 1.0, 3);
  for (double frac : {0.05, 0.3, 0.5, 0.8, 0.97}) {
    const double target = eig->energies[0] + frac * eig->spectral_width();
    const double beta = match_temperature(*eig, target);
    EXPECT_NEAR(canonical_energy(eig->energies, beta), target, 1e-9 * eig->spectral_width());
  }
}

TEST(MatchTemperature, OutsideSpectrumIsDomainError) {
  const auto eig = heisenberg(6, 1.0, 3);
  EXPECT_THROW(match_temperature(*eig, eig->energies[0] - 0.1), DomainError);
  EXPECT_THROW(match_temperature(*eig, eig->energies[eig->dim() - 1] + 0.1), DomainError);
}

TEST(Microcanonical, DefaultWindowAndEmptyWindow) {
  const auto eig = heisenberg(6, 1.0, 3);
  EXPECT_DOUBLE_EQ(default_half_width(*eig), 0.025 * eig->spectral_width());
  const double mid = 0.5 * (eig->energies[0] + eig->energies[eig->dim() - 1]);
  EXPECT_GT(microcanonical_count(*eig, mid, default_half_width(*eig)), 0);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(eig->dim());
  EXPECT_NEAR(microcanonical_average(eig->energies, ones, mid, default_half_width(*eig)), 1.0, 1e-14);
  try {
    microcanonical_average(eig->energies, ones, eig->energies[0] - 10.0, 1e-6);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("nearest"), std::string::npos);
  }
}

TEST(EthReport, FieldsAreConsistent) {
  const auto eig = heisenberg(6, 0.5, 9);
  Rng rng(1);
  const StateVector psi = random_ghz(6, rng);
  const SpectralState s(eig, psi);
  const EthReport r = eth_fluctuation_report(s, DirectionField::uniform(6, Vec3::UnitZ()));
  EXPECT_NEAR(r.difference, r.time_averaged_variance - r.thermal_variance, 1e-12);
  EXPECT_NEAR(r.difference_over_n, r.difference / 6.0, 1e-12);
  EXPECT_NEAR(r.difference_over_n2, r.difference / 36.0, 1e-12);
  EXPECT_NEAR(r.mean_energy, s.mean_energy(), 1e-12);
  EXPECT_NEAR(canonical_energy(eig->energies, r.beta), r.mean_energy, 1e-8 * eig->spectral_width());
}

TEST(EthReport, TimeAveragedVarianceMatchesSampling) {
  const auto eig = heisenberg(6, 1.0, 4);
  Rng rng(2);
  const SpectralState s(eig, random_ghz(6, rng));
  const DirectionField dirs = DirectionField::uniform(6, Vec3::UnitX());
  const EthReport r = eth_fluctuation_report(s, dirs);
  const ObservableApply a = macroscopic_observable(dirs);
  Rng trng(3);
  double sum = 0.0;
  const int samples = 2000;
  for (int k = 0; k < samples; ++k) {
    const Eigen::VectorXcd psi = evolve(s, uniform(trng, 1e3, 1e6)).amplitudes();
    const Eigen::VectorXcd ap = a(psi);
    sum += ap.squaredNorm() - std::pow(psi.dot(ap).real(), 2);
  }
  EXPECT_NEAR(sum / samples / 36.0, r.time_averaged_variance / 36.0, 5e-3);
}

TEST(EthReport, ThermalPhaseCloserThanLocalized) {
  auto mean_diff = [](double h) {
    double sum = 0.0;
    for (std::uint64_t k = 0; k < 4; ++k) {
      const auto eig = heisenberg(10, h, 17, k);
      Rng rng(100 + k);
      std::vector<Mat2c> us;
      std::vector<Vec3> axes;
      for (int i = 0; i < 10; ++i) {
        us.push_back(random_su2(rng));
        axes.push_back(rotated_z_axis(us.back()));
      }
      const SpectralState s(eig, local_rotated_ghz(us));
      sum += std::abs(eth_fluctuation_report(s, DirectionField::normalized(axes)).difference_over_n2);
    }
    return sum / 4;
  };
  const double thermal = mean_diff(0.5);
  EXPECT_LT(thermal, 0.1);
  EXPECT_GT(mean_diff(5.0), thermal);
}
