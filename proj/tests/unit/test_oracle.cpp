#include <gtest/gtest.h>

#include <cmath>

#include "freepick/oracle.hpp"
#include "freepick/sampler.hpp"

namespace {

using namespace freepick;

TEST(PickMatrix, Examples) {
  EXPECT_NEAR(std::abs(pick_matrix({{0.0}, {0.0}})(0, 0) - 1.0), 0.0, 1e-15);
  const CMatrix m = pick_matrix({{0.0, 0.5}, {0.0, 0.5}});
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(std::abs(m(i, j) - 1.0), 0.0, 1e-15);
  }
  EXPECT_NEAR(pick_min_eigenvalue({{0.0, 0.5}, {0.0, 0.5}}), 0.0, 1e-12);
}

TEST(PickMatrix, TwoNodeDeterminantCriterion) {
  for (double w2 = 0.05; w2 < 0.96; w2 += 0.05) {
    const double lam = pick_min_eigenvalue({{0.0, 0.5}, {0.0, w2}});
    if (std::abs(w2 - 0.5) < 1e-9) continue;
    EXPECT_EQ(lam > 0.0, w2 < 0.5) << w2;
  }
}

TEST(PickMatrix, RejectsBadNodes) {
  EXPECT_THROW(pick_matrix({{1.0}, {0.0}}), DomainError);
  EXPECT_THROW(pick_matrix({{0.2, 0.2}, {0.0, 0.1}}), DomainError);
  EXPECT_THROW(pick_matrix({{0.2}, {0.0, 0.1}}), DimensionError);
}

TEST(SchurSolve, Examples) {
  const auto f = schur_solve({{0.0, 0.5}, {0.0, 0.25}});
  ASSERT_TRUE(f.has_value());
  EXPECT_NEAR(std::abs((*f)(0.0)), 0.0, 1e-10);
  EXPECT_NEAR(std::abs((*f)(0.5) - 0.25), 0.0, 1e-10);
  // f = z g with g(0.5) = 0.5.
  EXPECT_NEAR(std::abs((*f)(0.5) / 0.5 - 0.5), 0.0, 1e-10);

  EXPECT_FALSE(schur_solve({{0.0, 0.5}, {0.0, 0.6}}).has_value());

  const auto id = schur_solve({{0.3}, {0.3}});
  ASSERT_TRUE(id.has_value());
  EXPECT_NEAR(std::abs((*id)(0.3) - 0.3), 0.0, 1e-12);
}

TEST(SchurSolve, BoundaryCase) {
  // w = z at two nodes forces f(z) = z.
  const auto f = schur_solve({{0.0, 0.5}, {0.0, 0.5}});
  ASSERT_TRUE(f.has_value());
  for (double x : {-0.7, 0.1, 0.9}) EXPECT_NEAR(std::abs((*f)(x) - x), 0.0, 1e-9);
  EXPECT_FALSE(schur_solve({{0.0, 0.5, 0.2}, {0.0, 0.5, 0.3}}).has_value());
}

TEST(SchurSolve, AgreesWithPickMatrix) {
  Rng rng(60, 0);
  int solvable = 0;
  for (int t = 0; t < 500; ++t) {
    ScalarPickData data;
    const int n = rng.uniform_int(1, 4);
    for (int i = 0; i < n; ++i) {
      data.z.push_back(std::polar(std::sqrt(rng.uniform()) * 0.95, rng.uniform(0.0, 6.283185307179586)));
      // Draw targets near the nodes half of the time so both outcomes occur.
      const Complex w = (t % 2 == 0) ? 0.8 * data.z.back() + 0.15 * rng.complex_normal()
                                     : std::polar(std::sqrt(rng.uniform()), rng.uniform(0.0, 6.283185307179586));
      data.w.push_back(std::abs(w) < 0.999 ? w : 0.999 * w / std::abs(w));
    }
    const double lam = pick_min_eigenvalue(data);
    const auto f = schur_solve(data);
    EXPECT_EQ(f.has_value(), lam >= -1e-8) << "instance " << t << " min eigenvalue " << lam;
    if (!f) continue;
    ++solvable;
    for (int i = 0; i < n; ++i) EXPECT_NEAR(std::abs((*f)(data.z[i]) - data.w[i]), 0.0, 1e-10);
    for (int k = 0; k < 5; ++k) {
      EXPECT_LE(std::abs((*f)(std::polar(rng.uniform(), rng.uniform(0.0, 6.283185307179586)))), 1.0 + 1e-10);
    }
  }
  EXPECT_GT(solvable, 50);
  EXPECT_LT(solvable, 450);
}

}  // namespace
