#include <benchmark/benchmark.h>

#include <random>

#include "mbqc/mbqc.hpp"
#include "mbqc/scheme_io.hpp"
#include "mbqc/string_order.hpp"

using namespace mbqc;

namespace {

CVec random_vector(int n) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  CVec v(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(g(rng), g(rng));
  return v / v.norm();
}

void BM_PauliApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const CVec v = random_vector(n);
  std::string lit;
  for (int i = 0; i < n; ++i) lit += "XYZ"[i % 3];
  const PauliOperator p = PauliOperator::parse(lit);
  for (auto _ : state) benchmark::DoNotOptimize(p.apply(v));
  state.SetItemsProcessed(state.iterations() * v.size());
}
BENCHMARK(BM_PauliApply)->Arg(12)->Arg(16)->Arg(20);

void BM_HamiltonianApply(benchmark::State& state) {
  HamiltonianSpec h;
  h.family = Family::ClusterField;
  h.n_sites = static_cast<int>(state.range(0));
  h.alpha = 0.3;
  const PauliSum H = hamiltonian(h);
  const CVec v = random_vector(h.n_sites);
  for (auto _ : state) benchmark::DoNotOptimize(H.apply(v));
}
BENCHMARK(BM_HamiltonianApply)->Arg(13)->Arg(17);

void BM_GroundState(benchmark::State& state) {
  HamiltonianSpec h;
  h.family = Family::ClusterField;
  h.n_sites = static_cast<int>(state.range(0));
  h.alpha = 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(ground_state(h).energy);
}
BENCHMARK(BM_GroundState)->Arg(9)->Arg(13)->Unit(benchmark::kMillisecond);

void BM_StringOrderTable(benchmark::State& state) {
  const ValidatedScheme vs = validate_or_throw(builtin_scheme("cluster_block2").instantiate_sites(13));
  ResourceState st = build_circuit_state(CircuitSpec::cluster_from_plus(13));
  certify_in_place(st, vs);
  for (auto _ : state) benchmark::DoNotOptimize(string_order_table(st, vs));
}
BENCHMARK(BM_StringOrderTable)->Unit(benchmark::kMillisecond);

void BM_ShotSampling(benchmark::State& state) {
  const ValidatedScheme vs = validate_or_throw(builtin_scheme("qca_block6").instantiate_sites(16));
  ResourceState st = build_circuit_state(CircuitSpec::qca(16, 2));
  certify_in_place(st, vs);
  MeasurementPattern p = MeasurementPattern::wire(vs);
  p.at(1) = {vs.G(1).elements.back(), 0.7};
  const ShotSampler sampler(st, vs, p);
  std::uint64_t shot = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.shot(1, shot++));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ShotSampling);

}  // namespace

BENCHMARK_MAIN();
