#include "macrospin/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>

#include "macrospin/dynamics.hpp"
#include "macrospin/lbits.hpp"
#include "macrospin/macroscopicity.hpp"
#include "macrospin/models.hpp"
#include "macrospin/rng.hpp"
#include "macrospin/thermal.hpp"

namespace macrospin {

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

void record(ValidationReport& report, std::string name, double measured, double tolerance,
            std::string detail = {}) {
  report.checks.push_back(
      {std::move(name), measured <= tolerance, measured, tolerance, std::move(detail)});
}

void guarded(ValidationReport& report, const std::string& name,
             const std::function<void(ValidationReport&)>& body) {
  try {
    body(report);
  } catch (const std::exception& e) {
    report.checks.push_back({name, false, NAN, 0.0, std::string("threw: ") + e.what()});
  }
}

std::shared_ptr<const EigenDecomposition> heisenberg(int n, double h, std::uint64_t seed) {
  const ModelParams p = preset_params(Preset::heisenberg, n, h);
  return std::make_shared<const EigenDecomposition>(
      diagonalize(build_xxz(p, sample_disorder(p, seed, 0))));
}

}  // namespace

ValidationReport run_validation_suite(std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  ValidationReport report;

  guarded(report, "correlation_psd", [&](ValidationReport& r) {
    Rng rng(derive_seed(seed, Stream::validation, {1}));
    double worst = 0.0;
    for (int n = 2; n <= 8; ++n) {
      for (int k = 0; k < 5; ++k) {
        Eigen::VectorXcd amp(Eigen::Index{1} << n);
        for (auto& a : amp) a = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
        const CorrelationMatrix c = correlation_matrix(StateVector::normalized(amp, n));
        const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c.blocks).eigenvalues()[0];
        worst = std::max(worst, -lo);
      }
    }
    record(r, "correlation_psd", worst, 1e-10, "most negative eigenvalue of C");
  });

  guarded(report, "ghz_macroscopicity", [&](ValidationReport& r) {
    Rng rng(derive_seed(seed, Stream::validation, {2}));
    double worst = 0.0;
    for (int n = 2; n <= 10; ++n) {
      const double m = maximize(correlation_matrix(random_ghz(n, rng))).value;
      worst = std::max(worst, std::abs(m - n * n));
    }
    record(r, "ghz_macroscopicity", worst, 1e-6, "|M - N^2| over random GHZ states");
  });

  guarded(report, "product_macroscopicity", [&](ValidationReport& r) {
    Rng rng(derive_seed(seed, Stream::validation, {3}));
    double worst = 0.0;
    for (int n = 2; n <= 8; ++n) {
      Eigen::Vector2cd phi(cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)),
                           cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)));
      phi.normalize();
      const double m = maximize(correlation_matrix(product_state(n, phi))).value;
      worst = std::max(worst, std::abs(m - n));
    }
    record(r, "product_macroscopicity", worst, 1e-6, "|M - N| over product states");
  });

  guarded(report, "eigensystem", [&](ValidationReport& r) {
    const ModelParams p = preset_params(Preset::heisenberg, 8, 2.0);
    const Hamiltonian h = build_xxz(p, sample_disorder(p, seed, 0));
    const EigenDecomposition eig = diagonalize(h);
    const double residual =
        (h.matrix * eig.vectors - eig.vectors * eig.energies.asDiagonal()).colwise().norm().maxCoeff();
    const double ortho =
        (eig.vectors.transpose() * eig.vectors - Eigen::MatrixXd::Identity(eig.dim(), eig.dim()))
            .cwiseAbs()
            .maxCoeff();
    record(r, "eigen_residual", residual / eig.operator_norm(), 1e-9, "max |H a - E a| / |H|");
    record(r, "eigen_orthonormality", ortho, 1e-10, "max |V^T V - I|");
  });

  guarded(report, "unitarity_and_energy", [&](ValidationReport& r) {
    const auto eig = heisenberg(8, 1.0, seed);
    Rng rng(derive_seed(seed, Stream::validation, {4}));
    const SpectralState s(eig, random_ghz(8, rng));
    const ModelParams p = preset_params(Preset::heisenberg, 8, 1.0);
    const Hamiltonian h = build_xxz(p, sample_disorder(p, seed, 0));
    const double e0 = s.mean_energy();
    double norm_err = 0.0;
    double energy_err = 0.0;
    for (double t : {0.1, 3.0, 170.0, 9000.0}) {
      const StateVector psi = evolve(s, t);
      norm_err = std::max(norm_err, std::abs(psi.amplitudes().norm() - 1.0));
      const Eigen::VectorXcd hpsi = h.matrix.cast<cplx>() * psi.amplitudes();
      const double e = psi.amplitudes().dot(hpsi).real();
      energy_err = std::max(energy_err, std::abs(e - e0) / eig->operator_norm());
    }
    record(r, "norm_conservation", norm_err, 1e-10);
    record(r, "energy_conservation", energy_err, 1e-9, "relative to |H|");
  });

  guarded(report, "parseval", [&](ValidationReport& r) {
    const auto eig = heisenberg(6, 3.0, seed);
    Rng rng(derive_seed(seed, Stream::validation, {5}));
    const SpectralState s(eig, random_ghz(6, rng));
    record(r, "parseval", std::abs(s.coeffs().squaredNorm() - 1.0), 1e-12, "sum |C_a|^2 - 1");
  });

  guarded(report, "diagonal_ensemble", [&](ValidationReport& r) {
    const auto eig = heisenberg(6, 1.0, seed);
    Rng rng(derive_seed(seed, Stream::validation, {6}));
    const SpectralState s(eig, random_ghz(6, rng));
    const ObservableApply obs = pauli_observable(6, 0, Axis::z);
    const double de = diagonal_ensemble_average(s, obs);
    Rng trng(derive_seed(seed, Stream::validation, {7}));
    double sum = 0.0;
    const int samples = 2000;
    for (int k = 0; k < samples; ++k)
      sum += expectation(evolve(s, uniform(trng, 1e4, 1e6)).amplitudes(), obs);
    record(r, "diagonal_ensemble", std::abs(sum / samples - de), 5e-3,
           "sampled time average vs diagonal ensemble of sigma_z^(0)");
  });

  guarded(report, "thermal_temperature_match", [&](ValidationReport& r) {
    const auto eig = heisenberg(6, 0.5, seed);
    const double target = eig->energies[0] + 0.3 * eig->spectral_width();
    const double beta = match_temperature(*eig, target);
    record(r, "thermal_temperature_match",
           std::abs(canonical_energy(eig->energies, beta) - target), 1e-9 * eig->spectral_width());
  });

  guarded(report, "rotated_neel_closed_form", [&](ValidationReport& r) {
    double worst = 0.0;
    for (int n : {4, 6, 8}) {
      for (double theta : {0.0, std::acos(1.0 / 3.0), std::numbers::pi / 2}) {
        const CorrelationMatrix c = correlation_matrix(rotated_neel_ghz(n, theta));
        const std::vector<Vec3> z(static_cast<std::size_t>(n), Vec3::UnitZ());
        const double expected = n + (n * n - n) * std::cos(theta) * std::cos(theta);
        worst = std::max(worst, std::abs(max_signed_variance(c, z).value - expected));
        worst = std::max(worst, std::abs(staggered_variance(rotated_neel_ghz(n, theta), theta) -
                                         n * n));
      }
    }
    record(r, "rotated_neel_closed_form", worst, 1e-9);
  });

  guarded(report, "lbit_conservation", [&](ValidationReport& r) {
    const LbitModel model = generate_lbit_model(8, 1.0, 5.0, 1.0, seed);
    Rng rng(derive_seed(seed, Stream::validation, {8}));
    const StateVector psi0 = random_ghz(8, rng);
    const CorrelationMatrix c0 = correlation_matrix(psi0);
    double worst = 0.0;
    for (double t : {0.5, 40.0, 3000.0}) {
      const CorrelationMatrix ct = correlation_matrix(lbit_evolve(model, psi0, t));
      for (int i = 0; i < 8; ++i) {
        worst = std::max(worst, std::abs(ct.mean_spins[i].z() - c0.mean_spins[i].z()));
        for (int j = 0; j < 8; ++j)
          worst = std::max(worst, std::abs(ct.block(i, j)(2, 2) - c0.block(i, j)(2, 2)));
      }
    }
    record(r, "lbit_conservation", worst, 1e-12, "<sigma_z> and <sigma_z sigma_z> drift");
  });

  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace macrospin
