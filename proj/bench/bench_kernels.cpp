// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "macrospin/kernels.hpp"
#include "macrospin/rng.hpp"

namespace {

using namespace macrospin;

Eigen::VectorXcd random_amplitudes(int n) {
  Rng rng(derive_seed(7, Stream::validation, {static_cast<std::uint64_t>(n)}));
  Eigen::VectorXcd v(Eigen::Index{1} << n);
  for (auto& a : v) a = cplx(uniform(rng, -1, 1), uniform(rng, -1, 1));
  return v.normalized();
}

template <bool Parallel>
void BM_CorrelationMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::VectorXcd psi = random_amplitudes(n);
  const std::span<const cplx> span(psi.data(), static_cast<std::size_t>(psi.size()));
  for (auto _ : state) {
    auto c = Parallel ? kernels::omp::correlation_matrix(span, n)
                      : kernels::serial::correlation_matrix(span, n);
    benchmark::DoNotOptimize(c.blocks.data());
  }
}

template <bool Parallel>
void BM_XxzMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const kernels::XxzCouplings c{n, 1.0, 1.0, 0.1, true};
  const std::vector<double> fields(static_cast<std::size_t>(n), 0.3);
  for (auto _ : state) {
    auto h = Parallel ? kernels::omp::xxz_matrix(c, fields) : kernels::serial::xxz_matrix(c, fields);
    benchmark::DoNotOptimize(h.data());
  }
}

template <bool Parallel>
void BM_EvolveGrid(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::Index dim = Eigen::Index{1} << n;
  const Eigen::MatrixXd h = Eigen::MatrixXd::Random(dim, dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h + h.transpose());
  const Eigen::VectorXcd coeffs = random_amplitudes(n);
  std::vector<double> times(32);
  for (std::size_t k = 0; k < times.size(); ++k) times[k] = 0.5 * static_cast<double>(k);
  for (auto _ : state) {
    auto out = Parallel
                   ? kernels::omp::evolve_grid(es.eigenvectors(), es.eigenvalues(), coeffs, times)
                   : kernels::serial::evolve_grid(es.eigenvectors(), es.eigenvalues(), coeffs, times);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_LbitEnergies(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(n, -1.0, 1.0);
  const Eigen::MatrixXd v = Eigen::MatrixXd::Constant(n, n, 0.1);
  const kernels::LbitCouplings c{&e, &v};
  for (auto _ : state) {
    auto out = Parallel ? kernels::omp::lbit_energies(c) : kernels::serial::lbit_energies(c);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_CorrelationMatrix<false>)->Arg(8)->Arg(12)->Arg(14);
BENCHMARK(BM_CorrelationMatrix<true>)->Arg(8)->Arg(12)->Arg(14);
BENCHMARK(BM_XxzMatrix<false>)->Arg(8)->Arg(10)->Arg(12);
BENCHMARK(BM_XxzMatrix<true>)->Arg(8)->Arg(10)->Arg(12);
BENCHMARK(BM_EvolveGrid<false>)->Arg(8)->Arg(10);
BENCHMARK(BM_EvolveGrid<true>)->Arg(8)->Arg(10);
BENCHMARK(BM_LbitEnergies<false>)->Arg(12)->Arg(16);
BENCHMARK(BM_LbitEnergies<true>)->Arg(12)->Arg(16);

BENCHMARK_MAIN();
