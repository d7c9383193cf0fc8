#include <gtest/gtest.h>

#include <algorithm>

#include "freepick/sampler.hpp"
#include "instances.hpp"

namespace {

using namespace freepick;

const PolyMatrix kDisk = PolyMatrix::scalar_variable(1);

bool bit_equal(const MatrixTuple& a, const MatrixTuple& b) {
  if (a.size() != b.size() || a.dims() != b.dims()) return false;
  for (int r = 0; r < a.dims(); ++r) {
    if (a[r] != b[r]) return false;
  }
  return true;
}

TEST(Rng, Reproducible) {
  Rng a(9, 3);
  Rng b(9, 3);
  Rng c(9, 4);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  Rng d(9, 3);
  EXPECT_NE(d.uniform(), c.uniform());
}

TEST(Rng, NormalMoments) {
  Rng rng(10, 0);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(sq / n, 1.0, 0.05);
}

TEST(Rng, HaarIsUnitaryAndSimilarityBounded) {
  Rng rng(11, 0);
  const CMatrix u = haar_unitary(4, rng);
  EXPECT_LE(op_norm(u.adjoint() * u - CMatrix::Identity(4, 4)), 1e-12);
  const RandomSimilarity s = random_similarity(4, 10.0, rng);
  for (double c : {0.0, 0.5, 1.0}) {
    const Eigen::JacobiSVD<CMatrix> svd(s.at(c));
    EXPECT_LE(svd.singularValues()(0) / svd.singularValues()(3), std::pow(10.0, c) * (1 + 1e-12));
  }
}

TEST(SampleConfig, Validation) {
  EXPECT_THROW(SampleConfig{.kappa = 0.5}.validate(), DomainError);
  EXPECT_THROW(SampleConfig{.shrink = 0.0}.validate(), DomainError);
  EXPECT_THROW(SampleConfig{.shrink = 1.5}.validate(), DomainError);
  EXPECT_NO_THROW((SampleConfig{.kappa = 1.0, .shrink = 1.0}.validate()));
}

TEST(SampleGdelta, DiskNorms) {
  const auto xs = sample_gdelta(kDisk, SampleConfig{.seed = 1, .max_size = 4, .count = 60});
  ASSERT_EQ(xs.size(), 60u);
  for (const MatrixTuple& x : xs) {
    EXPECT_GE(x.size(), 1);
    EXPECT_LE(x.size(), 4);
    const double nrm = op_norm(x[0]);
    EXPECT_GE(nrm, 0.5 - 1e-9);
    EXPECT_LE(nrm, 0.99 + 1e-9);
  }
}

TEST(SampleGdelta, RowBall) {
  for (const MatrixTuple& x : sample_gdelta(PolyMatrix::row_ball(2), SampleConfig{.seed = 2, .count = 40})) {
    const CMatrix s = x[0].adjoint() * x[0] + x[1].adjoint() * x[1];
    EXPECT_LE(herm_eig(s).values.maxCoeff(), 0.99 * 0.99 + 1e-9);
  }
}

TEST(SampleGdelta, DeterministicAcrossThreadCounts) {
  const PolyMatrix delta = PolyMatrix::polydisk(2);
  const auto a = sample_gdelta(delta, SampleConfig{.seed = 5, .count = 30, .threads = 1});
  const auto b = sample_gdelta(delta, SampleConfig{.seed = 5, .count = 30, .threads = 4});
  const auto c = sample_gdelta(delta, SampleConfig{.seed = 6, .count = 30, .threads = 1});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(bit_equal(a[i], b[i])) << i;
  EXPECT_FALSE(bit_equal(a[0], c[0]) && bit_equal(a[1], c[1]));
}

TEST(SampleVariety, FirstSampleIsLambda) {
  Rng rng(12, 0);
  const MatrixTuple lam = fptest::random_point(kDisk, 2, rng);
  const auto vs = sample_variety(compute_algebra(lam), kDisk, SampleConfig{.seed = 1, .count = 10});
  ASSERT_FALSE(vs.empty());
  EXPECT_TRUE(bit_equal(vs[0].point, lam));
}

TEST(SampleVariety, DiagonalRestrictionsReachNodes) {
  const Complex z1(0.2, 0.1);
  const Complex z2(-0.4, 0.3);
  const auto vs = sample_variety(compute_algebra(fptest::diag_point({z1, z2})), kDisk,
                                 SampleConfig{.seed = 2, .count = 40});
  bool hit1 = false;
  bool hit2 = false;
  for (const VarietySample& s : vs) {
    if (s.point.size() != 1) continue;
    hit1 = hit1 || std::abs(s.point[0](0, 0) - z1) < 1e-9;
    hit2 = hit2 || std::abs(s.point[0](0, 0) - z2) < 1e-9;
  }
  EXPECT_TRUE(hit1);
  EXPECT_TRUE(hit2);
}

TEST(SampleVariety, SamplesSatisfyRelations) {
  Rng rng(13, 0);
  for (const char* kind : {"scalar", "row_ball", "bidisk"}) {
    const PolyMatrix delta = fptest::delta_of(kind);
    const AlgebraBasis b = compute_algebra(fptest::random_point(delta, 2, rng));
    const auto rel = b.relation_polys();
    const auto vs = sample_variety(b, delta, SampleConfig{.seed = 3, .count = 30});
    ASSERT_FALSE(vs.empty());
    for (const VarietySample& s : vs) {
      EXPECT_TRUE(in_variety(b, s.point, 1e-8));
      EXPECT_TRUE(in_gdelta(delta, s.point).inside);
      EXPECT_NEAR(s.delta_norm, op_norm(eval_matrix(delta, s.point)), 1e-12);
      if (rel.empty()) continue;
      // Random combinations of relation polynomials vanish as well.
      for (int t = 0; t < 20; ++t) {
        FreePoly p(b.d());
        double scale = 0.0;
        for (const FreePoly& q : rel) {
          const Complex c = rng.complex_normal();
          p += c * q;
          scale += std::abs(c);
        }
        EXPECT_LE(op_norm(eval(p, s.point)), 1e-8 * std::max(1.0, scale)) << kind;
      }
    }
  }
}

TEST(EstimateSup, NormalLambdaIsASample) {
  const AlgebraBasis b = compute_algebra(fptest::diag_point({0.0, 0.5}));
  const auto p0 = membership(b, fptest::diag({0.0, 0.9}), 1e-8);
  ASSERT_TRUE(p0.has_value());
  const SupEstimate est = estimate_sup(b, kDisk, *p0, SampleConfig{.seed = 1, .count = 20});
  EXPECT_GE(est.value, 0.9 - 1e-12);
}

TEST(EstimateSup, UnitarySimilarityKeepsScalarSpectrum) {
  // With kappa = 1 every similarity is unitary, so the orbit of a normal Lambda
  // stays normal and the sup is the largest scalar value.
  const AlgebraBasis b = compute_algebra(fptest::diag_point({0.1, Complex(-0.3, 0.4), 0.6}));
  const auto p0 = membership(b, fptest::diag({0.2, 0.7, Complex(0.0, -0.5)}), 1e-8);
  ASSERT_TRUE(p0.has_value());
  const SupEstimate est = estimate_sup(b, kDisk, *p0, SampleConfig{.seed = 2, .count = 40, .kappa = 1.0});
  EXPECT_GE(est.value, 0.7 - 1e-9);
  EXPECT_LE(est.value, 0.7 + 1e-6);
}

TEST(EstimateSup, WitnessesUnsolvableData) {
  const AlgebraBasis b = compute_algebra(fptest::diag_point({0.0, 0.5}));
  const auto p0 = membership(b, fptest::diag({0.0, 0.9}), 1e-8);
  const SupEstimate est = estimate_sup(b, kDisk, *p0, SampleConfig{.seed = 3, .count = 60});
  EXPECT_GT(est.value, 1.0);
  EXPECT_TRUE(in_variety(b, est.witness, 1e-8));
  EXPECT_NEAR(op_norm(eval(*p0, est.witness)), est.value, 1e-9);
}

TEST(EstimateSup, BoundedOnSolvableData) {
  Rng rng(14, 0);
  for (const char* kind : {"scalar", "row_ball", "bidisk"}) {
    const PickProblem p = fptest::random_solvable(kind, 2, rng);
    const PickPoint f = p.fold();
    const AlgebraBasis b = compute_algebra(f.x);
    const auto p0 = membership(b, f.w, 1e-8);
    ASSERT_TRUE(p0.has_value());
    const SupEstimate est = estimate_sup(b, p.delta, *p0, SampleConfig{.seed = 4, .count = 40});
    EXPECT_LE(est.value, 1.0 + 1e-6) << kind;
  }
}

}  // namespace
