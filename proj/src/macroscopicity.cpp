#include "macrospin/macroscopicity.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "macrospin/errors.hpp"

namespace macrospin {

namespace {

using Index = Eigen::Index;

// Per-site chart: alpha = frame * (sin t cos p, sin t sin p, cos t).
struct Charts {
  std::vector<Eigen::Matrix3d> frames;
  Eigen::VectorXd angles;  // (theta_0, phi_0, theta_1, phi_1, ...)
};

Charts centred_charts(const Eigen::VectorXd& flat) {
  const Index n = flat.size() / 3;
  Charts ch;
  ch.frames.resize(static_cast<std::size_t>(n));
  ch.angles.resize(2 * n);
  for (Index i = 0; i < n; ++i) {
    const Vec3 e1 = flat.segment<3>(3 * i).normalized();
    // least-aligned coordinate axis keeps the completion well conditioned
    Index k;
    e1.cwiseAbs().minCoeff(&k);
    Vec3 helper = Vec3::Zero();
    helper[k] = 1.0;
    const Vec3 e2 = (helper - helper.dot(e1) * e1).normalized();
    const Vec3 e3 = e1.cross(e2);
    Eigen::Matrix3d frame;
    frame << e1, e2, e3;
    ch.frames[static_cast<std::size_t>(i)] = frame;
    ch.angles[2 * i] = std::numbers::pi / 2.0;
    ch.angles[2 * i + 1] = 0.0;
  }
  return ch;
}

Eigen::VectorXd directions_from(const Charts& ch, const Eigen::VectorXd& angles) {
  const Index n = angles.size() / 2;
  Eigen::VectorXd flat(3 * n);
  for (Index i = 0; i < n; ++i) {
    const double t = angles[2 * i];
    const double p = angles[2 * i + 1];
    const Vec3 u(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t));
    flat.segment<3>(3 * i) = ch.frames[static_cast<std::size_t>(i)] * u;
  }
  return flat;
}

// Negative variance and its gradient in chart angles (we minimize).
double objective(const Eigen::MatrixXd& c, const Charts& ch, const Eigen::VectorXd& angles,
                 Eigen::VectorXd& grad) {
  const Index n = angles.size() / 2;
  const Eigen::VectorXd flat = directions_from(ch, angles);
  const Eigen::VectorXd g = 2.0 * (c * flat);
  grad.resize(2 * n);
  for (Index i = 0; i < n; ++i) {
    const double t = angles[2 * i];
    const double p = angles[2 * i + 1];
    const Eigen::Matrix3d& f = ch.frames[static_cast<std::size_t>(i)];
    const Vec3 d_theta = f * Vec3(std::cos(t) * std::cos(p), std::cos(t) * std::sin(p), -std::sin(t));
    const Vec3 d_phi = f * Vec3(-std::sin(t) * std::sin(p), std::sin(t) * std::cos(p), 0.0);
    grad[2 * i] = -g.segment<3>(3 * i).dot(d_theta);
    grad[2 * i + 1] = -g.segment<3>(3 * i).dot(d_phi);
  }
  return -flat.dot(c * flat);
}

double tangent_gradient_norm(const Eigen::MatrixXd& c, const Eigen::VectorXd& flat) {
  const Eigen::VectorXd g = 2.0 * (c * flat);
  double sum = 0.0;
  for (Index i = 0; i < flat.size() / 3; ++i) {
    const Vec3 a = flat.segment<3>(3 * i);
    const Vec3 gi = g.segment<3>(3 * i);
    sum += (gi - gi.dot(a) * a).squaredNorm();
  }
  return std::sqrt(sum);
}

bool near_pole(const Eigen::VectorXd& angles) {
  for (Index i = 0; i < angles.size(); i += 2)
    if (std::abs(std::sin(angles[i])) < 1e-6) return true;
  return false;
}

DirectionField to_field(const Eigen::VectorXd& flat) {
  std::vector<Vec3> dirs(static_cast<std::size_t>(flat.size() / 3));
  for (std::size_t i = 0; i < dirs.size(); ++i)
    dirs[i] = flat.segment<3>(3 * static_cast<Index>(i)).normalized();
  return DirectionField(std::move(dirs));
}

void check_sizes(const CorrelationMatrix& c, int n_sites) {
  if (c.n_sites() != n_sites || c.blocks.rows() != 3 * n_sites)
    throw ValidationError("direction field and correlation matrix sizes differ");
}

Vec3 random_unit(Rng& rng) {
  const double z = uniform(rng, -1.0, 1.0);
  const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec3(r * std::cos(phi), r * std::sin(phi), z);
}

}  // namespace

double variance(const CorrelationMatrix& c, const DirectionField& dirs) {
  check_sizes(c, dirs.n_sites());
  const Eigen::VectorXd flat = dirs.flat();
  return flat.dot(c.blocks * flat);
}

double variance(const CorrelationMatrix& c, const Eigen::VectorXd& flat_dirs) {
  if (flat_dirs.size() != c.blocks.rows())
    throw ValidationError("direction vector length must be 3N");
  for (Index i = 0; i < flat_dirs.size() / 3; ++i)
    if (std::abs(flat_dirs.segment<3>(3 * i).norm() - 1.0) > 1e-12)
      throw ValidationError("direction block " + std::to_string(i) + " is not a unit vector");
  return flat_dirs.dot(c.blocks * flat_dirs);
}

double projected_gradient_norm(const CorrelationMatrix& c, const DirectionField& dirs) {
  check_sizes(c, dirs.n_sites());
  return tangent_gradient_norm(c.blocks, dirs.flat());
}

DirectionField random_direction_field(int n_sites, Rng& rng) {
  std::vector<Vec3> dirs(static_cast<std::size_t>(n_sites));
  for (auto& d : dirs) d = random_unit(rng);
  return DirectionField::normalized(std::move(dirs));
}

AscentResult local_ascent(const CorrelationMatrix& c, const DirectionField& start,
                          const OptimizerOptions& options) {
  check_sizes(c, start.n_sites());
  const Eigen::MatrixXd& cm = c.blocks;
  const Index dim = 2 * start.n_sites();

  Charts ch = centred_charts(start.flat());
  Eigen::VectorXd x = ch.angles;
  Eigen::VectorXd grad;
  double f = objective(cm, ch, x, grad);
  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(dim, dim);
  bool fresh_hessian = true;

  AscentResult out;
  Eigen::VectorXd flat = directions_from(ch, x);
  out.gradient_norm = tangent_gradient_norm(cm, flat);

  int it = 0;
  for (; it < options.max_iterations && out.gradient_norm >= options.tol; ++it) {
    Eigen::VectorXd step = -(inv_hessian * grad);
    double slope = grad.dot(step);
    if (!(slope < 0.0)) {
      inv_hessian.setIdentity();
      fresh_hessian = true;
      step = -grad;
      slope = grad.dot(step);
    }
    // keep the first trial step within one radian per coordinate
    double alpha = std::min(1.0, 1.0 / std::max(step.cwiseAbs().maxCoeff(), 1e-300));
    Eigen::VectorXd x_new;
    Eigen::VectorXd grad_new;
    double f_new = f;
    bool accepted = false;
    const double slack = 1e-15 * std::max(1.0, std::abs(f));
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + alpha * step;
      f_new = objective(cm, ch, x_new, grad_new);
      if (f_new <= f + 1e-4 * alpha * slope + slack) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (fresh_hessian) break;  // steepest descent cannot improve further
      ch = centred_charts(directions_from(ch, x));
      x = ch.angles;
      f = objective(cm, ch, x, grad);
      inv_hessian.setIdentity();
      fresh_hessian = true;
      continue;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    x = std::move(x_new);
    grad = std::move(grad_new);
    f = f_new;
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_hessian) {
        inv_hessian *= sy / y.squaredNorm();
        fresh_hessian = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = inv_hessian * y;
      // H+ = (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      inv_hessian += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) -
                     rho * (hy * s.transpose() + s * hy.transpose());
    }

    flat = directions_from(ch, x);
    out.gradient_norm = tangent_gradient_norm(cm, flat);
    if (near_pole(x)) {
      ch = centred_charts(flat);
      x = ch.angles;
      f = objective(cm, ch, x, grad);
      inv_hessian.setIdentity();
      fresh_hessian = true;
    }
  }

  flat = directions_from(ch, x);
  out.directions = to_field(flat);
  const Eigen::VectorXd unit = out.directions.flat();
  out.value = unit.dot(cm * unit);
  out.gradient_norm = tangent_gradient_norm(cm, unit);
  out.iterations = it;
  out.converged = out.gradient_norm < options.tol;
  return out;
}

MacroResult maximize(const CorrelationMatrix& c, const OptimizerOptions& options) {
  const int n = c.n_sites();
  if (n < 1) throw ValidationError("empty correlation matrix");
  if (options.restarts < 1) throw ValidationError("at least one restart is required");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.blocks);
  const double lambda_max = es.eigenvalues()[es.eigenvalues().size() - 1];

  std::vector<DirectionField> starts;
  starts.reserve(static_cast<std::size_t>(options.restarts));
  {
    Rng rng(derive_seed(options.seed, Stream::optimizer, {0}));
    const Eigen::VectorXd top = es.eigenvectors().col(es.eigenvectors().cols() - 1);
    std::vector<Vec3> dirs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const Vec3 b = top.segment<3>(3 * i);
      dirs[static_cast<std::size_t>(i)] = b.norm() > 1e-12 ? Vec3(b.normalized()) : random_unit(rng);
    }
    starts.push_back(DirectionField::normalized(std::move(dirs)));
  }
  if (options.restarts >= 2) {
    Rng rng(derive_seed(options.seed, Stream::optimizer, {1}));
    DirectionField best = random_direction_field(n, rng);
    double best_value = variance(c, best);
    for (int k = 1; k < options.random_pool; ++k) {
      DirectionField cand = random_direction_field(n, rng);
      const double v = variance(c, cand);
      if (v > best_value) {
        best_value = v;
        best = std::move(cand);
      }
    }
    starts.push_back(std::move(best));
  }
  for (int r = 2; r < options.restarts; ++r) {
    Rng rng(derive_seed(options.seed, Stream::optimizer, {static_cast<std::uint64_t>(r)}));
    starts.push_back(random_direction_field(n, rng));
  }

  std::vector<AscentResult> results(starts.size());
  const auto n_starts = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n_starts; ++r)
    results[static_cast<std::size_t>(r)] = local_ascent(c, starts[static_cast<std::size_t>(r)], options);

  std::size_t best = 0;
  bool any_converged = false;
  for (std::size_t r = 0; r < results.size(); ++r) {
    any_converged = any_converged || results[r].converged;
    if (results[r].value > results[best].value) best = r;
  }

  MacroResult out;
  out.value = results[best].value;
  out.argmax = results[best].directions;
  out.restarts_used = static_cast<int>(results.size());
  out.converged = any_converged;
  out.eigen_upper_bound = lambda_max * n;
  out.suspicious = out.eigen_upper_bound > 1.05 * out.value;
  return out;
}

MacroResult maximize(const CorrelationMatrix& c, int restarts, double tol) {
  OptimizerOptions options;
  options.restarts = restarts;
  options.tol = tol;
  return maximize(c, options);
}

DirectionField staggered_directions(int n_sites, double theta) {
  const Vec3 chi(std::sin(theta), 0.0, std::cos(theta));
  std::vector<Vec3> dirs(static_cast<std::size_t>(n_sites));
  for (int i = 0; i < n_sites; ++i) dirs[static_cast<std::size_t>(i)] = (i % 2 == 0) ? chi : Vec3(-chi);
  return DirectionField::normalized(std::move(dirs));
}

double staggered_variance(const StateVector& state, double theta) {
  const DirectionField dirs = staggered_directions(state.n_sites(), theta);
  const Eigen::VectorXcd a_psi = apply_macroscopic(dirs, state.amplitudes());
  const double mean = state.amplitudes().dot(a_psi).real();
  return a_psi.squaredNorm() - mean * mean;
}

Eigen::MatrixXd projected_correlations(const CorrelationMatrix& c, std::span<const Vec3> axes) {
  const int n = c.n_sites();
  if (static_cast<int>(axes.size()) != n) throw ValidationError("need one axis per site");
  for (std::size_t i = 0; i < axes.size(); ++i)
    if (std::abs(axes[i].norm() - 1.0) > 1e-12)
      throw ValidationError("axis " + std::to_string(i) + " is not a unit vector");
  Eigen::MatrixXd q(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      q(i, j) = axes[static_cast<std::size_t>(i)].dot(c.block(i, j) * axes[static_cast<std::size_t>(j)]);
  return 0.5 * (q + q.transpose());
}

namespace {

double pattern_value(const Eigen::MatrixXd& q, const std::vector<int>& s) {
  double v = 0.0;
  for (Index i = 0; i < q.rows(); ++i)
    for (Index j = 0; j < q.cols(); ++j) v += s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)] * q(i, j);
  return v;
}

SignedVariance greedy_signs(const Eigen::MatrixXd& q) {
  const Index n = q.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  const Eigen::VectorXd top = es.eigenvectors().col(n - 1);
  SignedVariance best;
  best.exact = false;
  best.value = -std::numeric_limits<double>::infinity();
  for (int seed_kind = 0; seed_kind < 2; ++seed_kind) {
    std::vector<int> s(static_cast<std::size_t>(n), 1);
    if (seed_kind == 1)
      for (Index i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = top[i] >= 0.0 ? 1 : -1;
    Eigen::VectorXd field(n);
    for (Index i = 0; i < n; ++i) {
      field[i] = 0.0;
      for (Index j = 0; j < n; ++j) field[i] += q(i, j) * s[static_cast<std::size_t>(j)];
    }
    for (bool improved = true; improved;) {
      improved = false;
      for (Index k = 0; k < n; ++k) {
        const int sk = s[static_cast<std::size_t>(k)];
        const double delta = -4.0 * sk * (field[k] - q(k, k) * sk);
        if (delta > 1e-12) {
          s[static_cast<std::size_t>(k)] = -sk;
          for (Index j = 0; j < n; ++j) field[j] -= 2.0 * sk * q(j, k);
          improved = true;
        }
      }
    }
    const double v = pattern_value(q, s);
    if (v > best.value) {
      best.value = v;
      best.signs = s;
    }
  }
  return best;
}

}  // namespace

SignedVariance max_signed_variance(const CorrelationMatrix& c, std::span<const Vec3> axes,
                                   SignSearch search) {
  const Eigen::MatrixXd q = projected_correlations(c, axes);
  const int n = c.n_sites();
  if (search == SignSearch::greedy) return greedy_signs(q);
  if (n > kMaxSignEnumerationSites)
    throw CapacityError("exact sign enumeration is capped at " +
                        std::to_string(kMaxSignEnumerationSites) +
                        " sites; use SignSearch::greedy for an approximate maximum");

  std::vector<int> s(static_cast<std::size_t>(n), 1);
  Eigen::VectorXd field = q.rowwise().sum();
  double value = q.sum();
  double best_value = value;
  std::vector<int> best = s;
  // flip site ctz(step) on step k; the last site stays pinned to +1
  const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
  for (std::uint64_t step = 1; step < patterns; ++step) {
    const auto k = static_cast<Index>(std::countr_zero(step));
    const int sk = s[static_cast<std::size_t>(k)];
    value += -4.0 * sk * (field[k] - q(k, k) * sk);
    s[static_cast<std::size_t>(k)] = -sk;
    field -= 2.0 * sk * q.col(k);
    if (value > best_value) {
      best_value = value;
      best = s;
    }
  }
  SignedVariance out;
  out.signs = std::move(best);
  out.value = pattern_value(q, out.signs);
  out.exact = true;
  return out;
}

}  // namespace macrospin
