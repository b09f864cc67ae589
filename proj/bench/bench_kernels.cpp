// Serial reference kernels against their OpenMP counterparts on square lattices.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pwiener/kernels.hpp"

using namespace pwiener;

namespace {

struct Fixture {
  NodeGrid grid;
  std::vector<double> u, d, y;
  std::vector<std::uint8_t> fixed;
  kernels::EdgeWeights w;

  explicit Fixture(int cells) : grid(NodeGrid::over(Cube(Point(0.0, 0.0), 1.0), 2.0 / cells)) {
    u.resize(grid.size());
    d.resize(grid.size());
    y.resize(grid.size());
    fixed.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const Point x = grid.node(k);
      u[k] = std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]);
      d[k] = x[0] * x[1];
      fixed[k] = grid.on_face(k);
    }
    kernels::serial::edge_weights(grid, u, 3.0, 1e-10, w);
  }
};

template <double (*Energy)(const NodeGrid&, std::span<const double>, double)>
void energy(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(Energy(f.grid, f.u, 3.0));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(f.grid.size()));
}

template <void (*Weights)(const NodeGrid&, std::span<const double>, double, double, kernels::EdgeWeights&)>
void weights(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    Weights(f.grid, f.u, 3.0, 1e-10, f.w);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(f.grid.size()));
}

template <void (*Apply)(const NodeGrid&, const kernels::EdgeWeights&, double, std::span<const std::uint8_t>,
                        std::span<const double>, std::span<double>)>
void apply(benchmark::State& st) {
  Fixture f(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    Apply(f.grid, f.w, 0.5, f.fixed, f.d, f.y);
    benchmark::ClobberMemory();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(f.grid.size()));
}

}  // namespace

BENCHMARK(energy<kernels::serial::energy>)->Name("energy/serial")->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK(energy<kernels::parallel::energy>)->Name("energy/parallel")->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK(weights<kernels::serial::edge_weights>)->Name("edge_weights/serial")->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK(weights<kernels::parallel::edge_weights>)->Name("edge_weights/parallel")->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK(apply<kernels::serial::apply>)->Name("apply/serial")->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK(apply<kernels::parallel::apply>)->Name("apply/parallel")->Arg(128)->Arg(512)->Arg(1024);

BENCHMARK_MAIN();
