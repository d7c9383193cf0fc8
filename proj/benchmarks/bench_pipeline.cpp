#include <benchmark/benchmark.h>

#include "freepick/certificate.hpp"
#include "freepick/realization.hpp"
#include "freepick/sampler.hpp"

namespace {

using freepick::CMatrix;
using freepick::Complex;
using freepick::MatrixTuple;

MatrixTuple diagonal_point(int n) {
  CMatrix x = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) x(i, i) = Complex(0.8 * i / n - 0.3, 0.1 * i);
  return MatrixTuple({x});
}

void BM_EvalPoly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto p = freepick::parse_poly("x1*x2*x1 - 2*x2^3 + (1+2i)*x1*x2 + 0.5", 2);
  freepick::Rng rng(7, 0);
  const MatrixTuple x({freepick::ginibre(n, rng), freepick::ginibre(n, rng)});
  for (auto _ : state) benchmark::DoNotOptimize(freepick::eval(p, x));
}
BENCHMARK(BM_EvalPoly)->Arg(2)->Arg(8)->Arg(32);

void BM_ComputeAlgebra(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  freepick::Rng rng(11, 0);
  const MatrixTuple x({0.3 * freepick::ginibre(n, rng), 0.3 * freepick::ginibre(n, rng)});
  for (auto _ : state) benchmark::DoNotOptimize(freepick::compute_algebra(x));
}
BENCHMARK(BM_ComputeAlgebra)->Arg(2)->Arg(3)->Arg(4);

void BM_SolveDiagonal(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MatrixTuple lambda = diagonal_point(n);
  const auto basis = freepick::compute_algebra(lambda);
  const CMatrix w = 0.5 * lambda[0] * lambda[0];
  const auto delta = freepick::PolyMatrix::scalar_variable(1);
  const auto cm = freepick::build_constraint_map(basis, delta, w);
  for (auto _ : state) benchmark::DoNotOptimize(freepick::solve_feasibility(cm));
}
BENCHMARK(BM_SolveDiagonal)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TransferEval(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const MatrixTuple lambda = diagonal_point(3);
  const auto basis = freepick::compute_algebra(lambda);
  const CMatrix w = 0.5 * lambda[0] * lambda[0];
  const auto delta = freepick::PolyMatrix::scalar_variable(1);
  const auto cert = *freepick::solve_feasibility(freepick::build_constraint_map(basis, delta, w)).certificate;
  const auto r = freepick::lurking_isometry(basis, delta, w, cert);
  freepick::Rng rng(3, 0);
  const MatrixTuple x({0.5 * freepick::haar_unitary(m, rng)});
  for (auto _ : state) benchmark::DoNotOptimize(freepick::eval_transfer(r, x));
}
BENCHMARK(BM_TransferEval)->Arg(1)->Arg(4)->Arg(16);

}  // namespace
BENCHMARK_MAIN();
