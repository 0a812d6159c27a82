#pragma once

// Variance of macroscopic observables A = sum_i alpha_i . sigma^(i) and its
// maximum over all direction fields,
//
//   M(psi) = max_{|alpha_i| = 1} alpha^T C alpha,
//
// where C is the connected correlation matrix of the state. For N spin-1/2
// sites M lies in [N, N^2]; GHZ-type states reach N^2 and product states N.

#include <cstdint>
#include <span>
#include <vector>

#include "macrospin/spin_core.hpp"

namespace macrospin {

struct OptimizerOptions {
  int restarts = 16;
  // Stop once the sphere-projected gradient norm drops below this.
  double tol = 1e-8;
  int max_iterations = 500;
  // Random fields screened for the second start.
  int random_pool = 64;
  std::uint64_t seed = 0x6d6163726fULL;
};

struct MacroResult {
  double value = 0.0;
  DirectionField argmax{std::vector<Vec3>{}};
  int restarts_used = 0;
  bool converged = false;
  // lambda_max(C) * N, a certified upper bound on M.
  double eigen_upper_bound = 0.0;
  // Set when eigen_upper_bound exceeds value by more than 5%. Loose bounds are
  // normal for low-macroscopicity states, so this is a hint, not an error.
  bool suspicious = false;
};

// Outcome of one quasi-Newton ascent from a single start.
struct AscentResult {
  DirectionField directions{std::vector<Vec3>{}};
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// alpha^T C alpha. Throws ValidationError if sizes disagree.
double variance(const CorrelationMatrix& c, const DirectionField& dirs);
// Flat 3N form; throws ValidationError if any block is not a unit vector.
double variance(const CorrelationMatrix& c, const Eigen::VectorXd& flat_dirs);

// Norm of 2 C alpha projected onto the tangent spaces of the unit spheres.
double projected_gradient_norm(const CorrelationMatrix& c, const DirectionField& dirs);

// BFGS ascent on per-site spherical angles. Each site uses a chart rotated so
// the start direction sits on the chart equator; charts are re-centred when a
// direction comes within 1e-6 of a chart pole.
AscentResult local_ascent(const CorrelationMatrix& c, const DirectionField& start,
                          const OptimizerOptions& options = {});

// Multi-start maximization. Start 0 is the top eigenvector of C renormalized
// per site, start 1 the best of options.random_pool random fields, the rest
// are random. Restarts run in parallel; the best value wins with ties going
// to the lowest restart index.
MacroResult maximize(const CorrelationMatrix& c, const OptimizerOptions& options = {});
MacroResult maximize(const CorrelationMatrix& c, int restarts, double tol);

DirectionField random_direction_field(int n_sites, Rng& rng);

// S(theta) = sum_i (-1)^i (sin theta, 0, cos theta) . sigma^(i)
DirectionField staggered_directions(int n_sites, double theta);
// Variance of S(theta), evaluated directly on the state vector.
double staggered_variance(const StateVector& state, double theta);

enum class SignSearch { exact, greedy };

inline constexpr int kMaxSignEnumerationSites = 24;

struct SignedVariance {
  double value = 0.0;
  std::vector<int> signs;  // +1 / -1 per site
  bool exact = true;
};

// max over s in {+1,-1}^N of s^T Q s with Q_ij = b_i^T C_ij b_j. The exact
// search walks all 2^(N-1) patterns in Gray-code order (the global sign is
// redundant, the last site is pinned to +1). Above kMaxSignEnumerationSites
// the exact search throws CapacityError; SignSearch::greedy runs single-flip
// local search instead and marks the result inexact.
SignedVariance max_signed_variance(const CorrelationMatrix& c, std::span<const Vec3> axes,
                                   SignSearch search = SignSearch::exact);

// Q_ij = b_i^T C_ij b_j
Eigen::MatrixXd projected_correlations(const CorrelationMatrix& c, std::span<const Vec3> axes);

}  // namespace macrospin
