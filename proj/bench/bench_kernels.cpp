// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "gammarod/gamma_check.hpp"
#include "gammarod/limit_energy.hpp"
#include "gammarod/mesh.hpp"

using namespace gammarod;

namespace {

Curve arch() {
  return Curve(1.0, ScalarFunction::trig({1}, {1}), ScalarFunction::trig({1}, {1}, {M_PI / 2}));
}

const StiffnessField kStiffness = [](double x) {
  Eigen::Matrix4d M = Eigen::Matrix4d::Identity();
  M(1, 1) += x;
  M(0, 1) = M(1, 0) = 0.1;
  return M;
};

RodState random_state(int n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-0.1, 0.1);
  RodState s(n);
  for (int i = 0; i < s.coeffs().size(); ++i) s.coeffs()(i) = d(rng);
  return s;
}

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::Parallel : Exec::Serial; }

void BM_Energy(benchmark::State& st) {
  const DiscreteModel model(arch(), static_cast<int>(st.range(0)), kStiffness);
  const RodState s = random_state(model.elements());
  for (auto _ : st) benchmark::DoNotOptimize(model.energy(s, exec_of(st)));
}

void BM_Gradient(benchmark::State& st) {
  const DiscreteModel model(arch(), static_cast<int>(st.range(0)), kStiffness);
  const RodState s = random_state(model.elements());
  for (auto _ : st) benchmark::DoNotOptimize(model.gradient(s, exec_of(st)));
}

void BM_Hessian(benchmark::State& st) {
  const DiscreteModel model(arch(), static_cast<int>(st.range(0)), kStiffness);
  const RodState s = random_state(model.elements());
  for (auto _ : st) benchmark::DoNotOptimize(model.hessian(s, exec_of(st)));
}

void BM_RecoveryEnergy(benchmark::State& st) {
  const PolygonSection sec = PolygonSection::rectangle(1, 1);
  const TriMesh mesh = triangulate(sec, 0.1);
  const Curve c = arch();
  const SmoothState s{ScalarFunction::polynomial({0, 0.1}), ScalarFunction::trig({0.2}, {3}),
                      ScalarFunction::polynomial({0, 0, 0.1}), ScalarFunction::trig({0.3}, {2})};
  const WarpField w({{1, 1, 1, ScalarFunction::constant(0.1)}}, true, sec, c);
  const GammaQuadrature q{static_cast<int>(st.range(0)), 6};
  for (auto _ : st) {
    benchmark::DoNotOptimize(recovery_energy(c, MaterialField({1, 1}), s, w, 0.05, mesh, q, exec_of(st)));
  }
}

void BM_CellStiffnessAlongRod(benchmark::State& st) {
  const TriMesh mesh = triangulate(PolygonSection::rectangle(1, 1), 0.1);
  const MaterialField mat({1, 1}, 1.0, {0.2, 0.3, 0.0});
  const Curve c = arch();
  for (auto _ : st) {
    const DiscreteModel model(c, static_cast<int>(st.range(0)), cell_stiffness(mesh, mat, c),
                              DiscreteModel::kQuadPoints, exec_of(st));
    benchmark::DoNotOptimize(model.min_stiffness_eigenvalue());
  }
}

}  // namespace

BENCHMARK(BM_Energy)->ArgsProduct({{256, 4096}, {0, 1}});
BENCHMARK(BM_Gradient)->ArgsProduct({{256, 4096}, {0, 1}});
BENCHMARK(BM_Hessian)->ArgsProduct({{256, 4096}, {0, 1}});
BENCHMARK(BM_RecoveryEnergy)->ArgsProduct({{32}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CellStiffnessAlongRod)->ArgsProduct({{16}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
