#include <gtest/gtest.h>

#include <cmath>

#include "freepick/oracle.hpp"
#include "freepick/realization.hpp"
#include "freepick/sampler.hpp"
#include "instances.hpp"

namespace {

using namespace freepick;
using fptest::scalar_point;

const PolyMatrix kDisk = PolyMatrix::scalar_variable(1);

Realization solve_one(const PolyMatrix& delta, const MatrixTuple& x, const CMatrix& w) {
  const AlgebraBasis b = compute_algebra(x);
  const auto cert = solve_feasibility(build_constraint_map(b, delta, w)).certificate;
  if (!cert) throw std::runtime_error("infeasible test instance");
  return lurking_isometry(b, delta, w, *cert);
}

// phi(x) = x^2 with J = 1, L = 2: the input enters slot 1, D moves it to slot 2, B reads slot 2.
Realization square_map() {
  CMatrix v = CMatrix::Zero(3, 3);
  v(0, 2) = 1.0;
  v(1, 0) = 1.0;
  v(2, 1) = 1.0;
  Realization r = split_colligation(kDisk, v, 1);
  return r;
}

TEST(Realization, SwapExample) {
  const Realization r = solve_one(kDisk, scalar_point({0.0}), CMatrix::Zero(1, 1));
  ASSERT_EQ(r.L_dim, 1);
  EXPECT_NEAR(std::abs(r.A(0, 0)), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(r.B(0, 0)), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(r.C(0, 0)), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(r.D(0, 0)), 0.0, 1e-9);
  // The phases of B and C are free but their product is fixed by phi(x) = x.
  EXPECT_NEAR(std::abs(r.B(0, 0) * r.C(0, 0) - 1.0), 0.0, 1e-9);
  Rng rng(40, 0);
  for (int m = 1; m <= 4; ++m) {
    const CMatrix g = ginibre(m, rng);
    const CMatrix x = 0.9 * g / op_norm(g);
    EXPECT_LE((eval_transfer(r, MatrixTuple({x})) - x).norm(), 1e-9);
  }
}

TEST(Realization, LurkingVectorsSwap) {
  const AlgebraBasis b = compute_algebra(scalar_point({0.0}));
  const auto cert = solve_feasibility(build_constraint_map(b, kDisk, CMatrix::Zero(1, 1))).certificate;
  ASSERT_TRUE(cert.has_value());
  const LurkingVectors lv = lurking_vectors(b, kDisk, CMatrix::Zero(1, 1), *cert);
  ASSERT_EQ(lv.p.rows(), 2);
  EXPECT_NEAR(std::abs(lv.p(0, 0) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(lv.p(1, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(lv.q(0, 0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(lv.q(1, 0)), 1.0, 1e-9);
}

TEST(Realization, SinglePointMatchesSchurOracle) {
  Rng rng(41, 0);
  for (int t = 0; t < 5; ++t) {
    const Complex z = std::polar(rng.uniform(0.0, 0.8), rng.uniform(0.0, 6.28));
    const Complex w = std::polar(rng.uniform(0.0, 0.8), rng.uniform(0.0, 6.28));
    const Realization r = solve_one(kDisk, scalar_point({z}), CMatrix::Constant(1, 1, w));
    const auto phi = [&](Complex x) { return eval_transfer(r, scalar_point({x}))(0, 0); };
    EXPECT_NEAR(std::abs(phi(z) - w), 0.0, 1e-6);
    // The degree-one solutions through (z, w) form the Schur family with one
    // unimodular tail; read the tail off one value and compare elsewhere.
    const Complex x0 = z + 0.3 * (z == Complex(0.0) ? Complex(1.0) : -z / std::abs(z));
    const Complex b0 = (x0 - z) / (1.0 - std::conj(z) * x0);
    const Complex f0 = phi(x0);
    const Complex tail = (f0 - w) / (b0 * (1.0 - std::conj(w) * f0));
    EXPECT_NEAR(std::abs(tail), 1.0, 1e-6);
    const SchurFunction oracle({{z, w}}, tail);
    for (int k = 0; k < 10; ++k) {
      const Complex x = std::polar(rng.uniform(0.0, 0.95), rng.uniform(0.0, 6.28));
      EXPECT_NEAR(std::abs(phi(x) - oracle(x)), 0.0, 1e-6) << "instance " << t << " point " << x;
    }
  }
}

TEST(Realization, InvariantsOnRandomInstances) {
  Rng rng(42, 0);
  for (const char* kind : {"scalar", "row_ball", "bidisk"}) {
    for (int n = 1; n <= 3; ++n) {
      const auto s = fptest::solve_or_throw(fptest::random_solvable(kind, n, rng));
      const Realization& r = *s.out.realization;
      const CMatrix v = r.colligation();
      const auto eye = CMatrix::Identity(v.rows(), v.cols());
      EXPECT_LE(op_norm(v.adjoint() * v - eye), 1e-9) << kind;
      EXPECT_LE(op_norm(v * v.adjoint() - eye), 1e-9) << kind;
      const PickPoint f = s.problem.fold();
      EXPECT_LE(op_norm(eval_transfer(r, f.x) - f.w), 1e-6) << kind;
      const auto samples = sample_gdelta(r.delta, SampleConfig{.seed = 7, .max_size = 4, .count = 40});
      for (const MatrixTuple& x : samples) EXPECT_LE(op_norm(eval_transfer(r, x)), 1.0 + 1e-6);
      const MatrixTuple& a = samples[3];
      const MatrixTuple& b = samples[6];
      EXPECT_LE(op_norm(eval_transfer(r, direct_sum(a, b)) - block_diag(eval_transfer(r, a), eval_transfer(r, b))),
                1e-9);
    }
  }
}

TEST(Realization, SimilarityAxiom) {
  Rng rng(43, 0);
  const auto s = fptest::solve_or_throw(fptest::random_solvable("row_ball", 2, rng));
  const Realization& r = *s.out.realization;
  const MatrixTuple x = fptest::random_point(r.delta, 3, rng);
  const RandomSimilarity sim = random_similarity(3, 10.0, rng);
  for (double c : {1.0, 0.5, 0.25, 0.0}) {
    const CMatrix sm = sim.at(c);
    const MatrixTuple y = x.similar(sm);
    if (!in_gdelta(r.delta, y).inside) continue;
    const CMatrix lhs = eval_transfer(r, y);
    const CMatrix rhs = sm.inverse() * eval_transfer(r, x) * sm;
    const Eigen::JacobiSVD<CMatrix> svd(sm);
    const double cond = svd.singularValues()(0) / svd.singularValues()(2);
    EXPECT_LE(op_norm(lhs - rhs), 1e-6 * cond);
    break;
  }
}

TEST(Realization, RejectsOutsideGdelta) {
  const Realization r = solve_one(kDisk, scalar_point({0.0}), CMatrix::Zero(1, 1));
  EXPECT_THROW(eval_transfer(r, scalar_point({1.0})), DomainError);
  EXPECT_THROW(eval_transfer(r, scalar_point({0.1, 0.2})), DimensionError);
}

TEST(Derivative, SwapIsIdentity) {
  const Realization r = solve_one(kDisk, scalar_point({0.0}), CMatrix::Zero(1, 1));
  CMatrix lam(2, 2);
  lam << 0.2, 0.1, 0.0, -0.3;
  CMatrix h(2, 2);
  h << 0.05, Complex(0.0, 0.02), -0.01, 0.03;
  EXPECT_LE((derivative(r, MatrixTuple({lam}), MatrixTuple({h})) - h).norm(), 1e-9);
}

TEST(Derivative, SquareMap) {
  const Realization r = square_map();
  Rng rng(44, 0);
  const CMatrix lam = 0.3 * ginibre(3, rng);
  const CMatrix h = 0.1 * ginibre(3, rng);
  EXPECT_LE((eval_transfer(r, MatrixTuple({lam})) - lam * lam).norm(), 1e-12);
  EXPECT_LE((derivative(r, MatrixTuple({lam}), MatrixTuple({h})) - (lam * h + h * lam)).norm(), 1e-12);
}

TEST(Derivative, CentralDifference) {
  Rng rng(45, 0);
  const Realization r = fptest::random_colligation(PolyMatrix::polydisk(2), 2, rng);
  const MatrixTuple lam = fptest::random_point(r.delta, 2, rng);
  const MatrixTuple h = fptest::random_point(r.delta, 2, rng).scaled(0.2);
  const double step = 1e-5;
  const auto shifted = [&](double t) {
    std::vector<CMatrix> m;
    for (int k = 0; k < lam.dims(); ++k) m.push_back(lam[k] + t * h[k]);
    return MatrixTuple(std::move(m));
  };
  const CMatrix fd = (eval_transfer(r, shifted(step)) - eval_transfer(r, shifted(-step))) / (2 * step);
  const CMatrix exact = derivative(r, lam, h);
  EXPECT_LE((fd - exact).norm(), 1e-4 * exact.norm());
}

TEST(Derivative, RequiresScalarOutput) {
  Rng rng(46, 0);
  const Realization r = split_colligation(kDisk, haar_unitary(4, rng), 2);
  EXPECT_THROW(derivative(r, scalar_point({0.1}), scalar_point({0.1})), DimensionError);
}

}  // namespace
