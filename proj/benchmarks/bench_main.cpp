#include <benchmark/benchmark.h>

#include <random>

#include "krylovchaos/arnoldi.hpp"
#include "krylovchaos/chaostats.hpp"
#include "krylovchaos/models.hpp"

namespace {

kc::UnitaryMatrix haar(Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  kc::ComplexMatrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = kc::Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<kc::ComplexMatrix> qr(g);
  return kc::UnitaryMatrix::certify(qr.householderQ());
}

void BM_ArnoldiIterate(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const kc::UnitaryMatrix u = haar(d, 1);
  const kc::ComplexVector psi = kc::haar_random_state(d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(kc::arnoldi_iterate(u, psi));
}
BENCHMARK(BM_ArnoldiIterate)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_UnitaryEigenphases(benchmark::State& state) {
  const kc::UnitaryMatrix u = haar(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(kc::unitary_eigenphases(u));
}
BENCHMARK(BM_UnitaryEigenphases)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_UnitaryEigenphasesSchur(benchmark::State& state) {
  const kc::UnitaryMatrix u = haar(state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(kc::unitary_eigenphases_schur(u));
}
BENCHMARK(BM_UnitaryEigenphasesSchur)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_HermitianEigendecompose(benchmark::State& state) {
  const kc::ComplexMatrix h = kc::rmt_hamiltonian({static_cast<int>(state.range(0)), 1.0, 4});
  for (auto _ : state) benchmark::DoNotOptimize(kc::hermitian_eigendecompose(h));
}
BENCHMARK(BM_HermitianEigendecompose)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_DeltaKs(benchmark::State& state) {
  const auto d = static_cast<Eigen::Index>(state.range(0));
  const kc::ComplexMatrix v = haar(d, 5).matrix();
  const kc::ComplexMatrix id = kc::ComplexMatrix::Identity(d, d);
  for (auto _ : state) benchmark::DoNotOptimize(kc::delta_ks(v, id));
}
BENCHMARK(BM_DeltaKs)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_TrotterUnitary(benchmark::State& state) {
  const kc::TrotterParams p{{static_cast<int>(state.range(0)), 1.0, 0.1, 7, kc::ParitySector::None}, 3.77};
  for (auto _ : state) benchmark::DoNotOptimize(kc::trotter_unitary(p));
}
BENCHMARK(BM_TrotterUnitary)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
