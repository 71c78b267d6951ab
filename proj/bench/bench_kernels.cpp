// Parallel kernels against their serial references.
//   phoband_bench --benchmark_filter=Assemble

#include <map>

#include <benchmark/benchmark.h>

#include "phoband/assembly.hpp"
#include "phoband/sim.hpp"

using namespace phoband;

namespace {

struct Problem {
  UnitCellMesh mesh;
  PeriodicDofMap dofs;
  OperatorBundle bundle;
  HolomorphicMatrixFn fn;
  VecC g;
  std::vector<SearchRegion> squares;
  std::vector<cplx> anchors;

  explicit Problem(int n)
      : mesh(generate_structured(n, 0.378)), dofs(build_periodic_dof_map(mesh)), bundle(assemble(mesh, dofs)) {
    auto op = std::make_shared<const BlochOperator>(bundle, Vec2{kPi, kPi}, DielectricModel::constant(8.9));
    fn = bloch_fn(op, kDefaultPoleGuard);
    g = random_probe(fn.dimension, 1);
    // the four children of one square near the first band
    const SearchRegion parent{cplx(1.6, 0.0), 0.05, 3};
    for (const auto& c : parent.children()) {
      squares.push_back(c);
      anchors.push_back(parent.center);
    }
  }
};

const Problem& problem(int n) {
  static std::map<int, Problem> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, Problem(n)).first;
  return it->second;
}

void BM_AssembleSerial(benchmark::State& state) {
  const auto& p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_serial(p.mesh, p.dofs));
}

void BM_AssembleParallel(benchmark::State& state) {
  const auto& p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(p.mesh, p.dofs));
}

void batch(benchmark::State& state, Execution ex, NodeSolve strategy) {
  const auto& p = problem(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(indicator_batch(p.fn, p.squares, p.g, 16, kDefaultSolveTol, ex, strategy, p.anchors));
  }
}

void BM_IndicatorSerialDirect(benchmark::State& s) { batch(s, Execution::Serial, NodeSolve::Direct); }
void BM_IndicatorParallelDirect(benchmark::State& s) { batch(s, Execution::Parallel, NodeSolve::Direct); }
void BM_IndicatorSerialRecycled(benchmark::State& s) { batch(s, Execution::Serial, NodeSolve::Recycled); }
void BM_IndicatorParallelRecycled(benchmark::State& s) { batch(s, Execution::Parallel, NodeSolve::Recycled); }

}  // namespace

BENCHMARK(BM_AssembleSerial)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleParallel)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndicatorSerialDirect)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndicatorParallelDirect)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndicatorSerialRecycled)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IndicatorParallelRecycled)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
