#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "grid_oracle.hpp"
#include "macrospin/errors.hpp"
#include "macrospin/macroscopicity.hpp"

using namespace macrospin;

namespace {

StateVector random_state(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXcd amp(Eigen::Index{1} << n);
  for (auto& a : amp) a = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
  return StateVector::normalized(amp, n);
}

// Brute-force max over all sign patterns, no Gray code.
double brute_signed(const Eigen::MatrixXd& q) {
  const int n = static_cast<int>(q.rows());
  double best = -1e300;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = (mask >> i) & 1 ? -1.0 : 1.0;
    best = std::max(best, s.dot(q * s));
  }
  return best;
}

}  // namespace

TEST(Maximize, GhzReachesNSquared) {
  for (int n = 2; n <= 10; ++n) {
    const MacroResult r = maximize(correlation_matrix(ghz(n)));
    EXPECT_NEAR(r.value, n * n, 1e-6);
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.value, r.eigen_upper_bound + 1e-9);
  }
}

TEST(Maximize, ProductStateGivesN) {
  Rng rng(5);
  for (int n = 2; n <= 8; ++n) {
    Eigen::Vector2cd phi(cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)),
                         cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)));
    EXPECT_NEAR(maximize(correlation_matrix(product_state(n, phi))).value, n, 1e-6);
  }
}

TEST(Maximize, BoundsForRandomStates) {
  for (int n = 2; n <= 6; ++n) {
    const MacroResult r = maximize(correlation_matrix(random_state(n, 30 + static_cast<std::uint64_t>(n))));
    EXPECT_GE(r.value, 0.0);
    EXPECT_LE(r.value, n * n + 1e-9);
    EXPECT_LE(r.value, r.eigen_upper_bound + 1e-9);
    EXPECT_LT(projected_gradient_norm(correlation_matrix(random_state(n, 30 + static_cast<std::uint64_t>(n))),
                                      r.argmax),
              1e-6);
  }
}

TEST(Maximize, AgreesWithGridOracleTwoSites) {
  for (std::uint64_t k = 0; k < 5; ++k) {
    const CorrelationMatrix c = correlation_matrix(random_state(2, 500 + k));
    EXPECT_NEAR(maximize(c).value, oracle::grid_maximum(c.blocks), 1e-5);
  }
}

TEST(Maximize, AgreesWithGridOracleThreeSites) {
  const CorrelationMatrix c = correlation_matrix(random_state(3, 900));
  EXPECT_NEAR(maximize(c).value, oracle::grid_maximum(c.blocks), 1e-5);
}

TEST(Maximize, DeterministicForFixedSeed) {
  const CorrelationMatrix c = correlation_matrix(random_state(5, 3));
  const MacroResult a = maximize(c);
  const MacroResult b = maximize(c);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.argmax.flat(), b.argmax.flat());
}

TEST(Maximize, RejectsZeroRestarts) {
  EXPECT_THROW(maximize(correlation_matrix(ghz(3)), 0, 1e-8), ValidationError);
}

TEST(LocalAscent, NeverDecreasesFromStart) {
  const CorrelationMatrix c = correlation_matrix(random_state(4, 77));
  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    const DirectionField start = random_direction_field(4, rng);
    const AscentResult r = local_ascent(c, start);
    EXPECT_GE(r.value, variance(c, start) - 1e-12);
  }
}

TEST(LocalAscent, StartAtPoleIsHandled) {
  // GHZ optimum sits exactly on the z pole of every site.
  const CorrelationMatrix c = correlation_matrix(ghz(4));
  const AscentResult r = local_ascent(c, DirectionField::uniform(4, Vec3::UnitZ()));
  EXPECT_NEAR(r.value, 16.0, 1e-12);
  EXPECT_TRUE(r.converged);
}

TEST(Variance, FlatFormRejectsNonUnitBlocks) {
  const CorrelationMatrix c = correlation_matrix(ghz(2));
  Eigen::VectorXd flat = Eigen::VectorXd::Zero(6);
  flat[2] = 1.0;
  flat[5] = 0.5;
  EXPECT_THROW(variance(c, flat), ValidationError);
  flat[5] = 1.0;
  EXPECT_NEAR(variance(c, flat), 4.0, 1e-14);
}

TEST(RotatedNeel, SignedVarianceClosedForm) {
  for (int n : {4, 6, 8}) {
    for (double theta : {0.0, std::acos(1.0 / 3.0), std::acos(2.0 / 3.0), std::numbers::pi / 2}) {
      const StateVector s = rotated_neel_ghz(n, theta);
      const CorrelationMatrix c = correlation_matrix(s);
      const std::vector<Vec3> z(static_cast<std::size_t>(n), Vec3::UnitZ());
      const double expected = n + (n * n - n) * std::pow(std::cos(theta), 2);
      EXPECT_NEAR(max_signed_variance(c, z).value, expected, 1e-9);
      EXPECT_NEAR(staggered_variance(s, theta), n * n, 1e-9);
      EXPECT_NEAR(variance(c, staggered_directions(n, theta)), n * n, 1e-9);
    }
  }
}

TEST(SignedVariance, GrayCodeMatchesBruteForce) {
  Rng rng(3);
  for (int n = 2; n <= 8; ++n) {
    const CorrelationMatrix c = correlation_matrix(random_state(n, 60 + static_cast<std::uint64_t>(n)));
    std::vector<Vec3> axes;
    for (int i = 0; i < n; ++i) axes.push_back(random_direction_field(1, rng)[0]);
    const SignedVariance sv = max_signed_variance(c, axes);
    EXPECT_TRUE(sv.exact);
    EXPECT_NEAR(sv.value, brute_signed(projected_correlations(c, axes)), 1e-12);
    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s[i] = sv.signs[static_cast<std::size_t>(i)];
    EXPECT_NEAR(s.dot(projected_correlations(c, axes) * s), sv.value, 1e-12);
  }
}

TEST(SignedVariance, GreedyIsFlaggedAndBelowExact) {
  const CorrelationMatrix c = correlation_matrix(random_state(6, 12));
  const std::vector<Vec3> z(6, Vec3::UnitZ());
  const SignedVariance exact = max_signed_variance(c, z);
  const SignedVariance greedy = max_signed_variance(c, z, SignSearch::greedy);
  EXPECT_FALSE(greedy.exact);
  EXPECT_LE(greedy.value, exact.value + 1e-12);
}

TEST(SignedVariance, ExactSearchCapacity) {
  CorrelationMatrix c;
  c.blocks = Eigen::MatrixXd::Identity(75, 75);
  c.mean_spins.assign(25, Vec3::Zero());
  const std::vector<Vec3> z(25, Vec3::UnitZ());
  EXPECT_THROW(max_signed_variance(c, z), CapacityError);
  const SignedVariance g = max_signed_variance(c, z, SignSearch::greedy);
  EXPECT_NEAR(g.value, 25.0, 1e-12);
}
