#include <benchmark/benchmark.h>

#include "hmp/dynamics.hpp"
#include "hmp/ocp.hpp"
#include "hmp/planner.hpp"
#include "hmp/scenarios.hpp"

using namespace hmp;

static void BM_InverseDynamics(benchmark::State& st) {
  const auto model = standing_scenario().model;
  JointState s{Vec::Constant(3, 0.4), Vec::Constant(3, -0.3), Vec::Constant(3, 1.2)};
  for (auto _ : st) benchmark::DoNotOptimize(inverse_dynamics(model, s));
}
BENCHMARK(BM_InverseDynamics);

static void BM_MassMatrixClosedVsCrb(benchmark::State& st) {
  const auto model = standing_scenario().model;
  const Vec q = Vec::Constant(3, 0.4);
  for (auto _ : st) {
    if (st.range(0) == 0)
      benchmark::DoNotOptimize(mass_matrix_closed_form(model, q));
    else
      benchmark::DoNotOptimize(mass_matrix_crb(model, q));
  }
}
BENCHMARK(BM_MassMatrixClosedVsCrb)->Arg(0)->Arg(1);

static void BM_SolveSegment(benchmark::State& st) {
  OcpSpec s;
  s.nodes = static_cast<int>(st.range(0));
  s.goal = GoalBox::point(1.0, 0.0);
  s.weights = [](double) { return CostWeights{1.0, 0.0, 0.0}; };
  s.qd_max = 1.4;
  const auto di = double_integrator(1.0);
  for (auto _ : st) benchmark::DoNotOptimize(solve_segment(s, di, JointMode::Active));
}
BENCHMARK(BM_SolveSegment)->Arg(16)->Arg(30)->Arg(60)->Unit(benchmark::kMicrosecond);

static void BM_EvaluateMotion(benchmark::State& st) {
  const Scenario sc = throwing_scenario();
  const Resolution res{sc.search.dt, sc.search.nodes};
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_motion(sc.T, sc, res).score);
}
BENCHMARK(BM_EvaluateMotion)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
