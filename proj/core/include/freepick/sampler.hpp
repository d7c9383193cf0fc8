#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "freepick/algebra.hpp"

namespace freepick {

/// Deterministic per-stream generator.  Stream `index` of seed `seed` is a
/// mt19937_64 seeded through std::seed_seq with both 64-bit values split into
/// halves; uniform and normal variates are derived by hand so that the bit
/// pattern does not depend on the standard library's distributions.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t index);

  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi);  // inclusive
  double normal();
  Complex complex_normal();  // E|z|^2 = 1

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

CMatrix ginibre(int m, Rng& rng);  // entries complex_normal / sqrt(m)
CMatrix haar_unitary(int m, Rng& rng);

/// s = U diag(kappa^{c e_i}) V* with e_i in [0, 1] drawn once; cond(s) <= kappa^c.
struct RandomSimilarity {
  CMatrix u;
  CMatrix v;
  RVector exponents;
  double kappa = 1.0;
  CMatrix at(double c) const;
};

RandomSimilarity random_similarity(int m, double kappa, Rng& rng);

struct SampleConfig {
  std::uint64_t seed = 0;
  int max_size = 4;
  int count = 100;
  double kappa = 10.0;  // condition bound for similarities, >= 1
  double shrink = 0.5;  // factor applied to the similarity exponent while outside G_delta, in (0, 1]
  int threads = 0;      // 0: hardware concurrency
  void validate() const;
};

/// Ginibre tuples of sizes 1..max_size scaled by bisection so that
/// ||delta(x)|| is a uniform draw from [0.5, 0.99].
std::vector<MatrixTuple> sample_gdelta(const PolyMatrix& delta, const SampleConfig& cfg);

/// A variety sample together with the unconjugated point it came from.
struct VarietySample {
  MatrixTuple base;  // Lambda^{(+)k} or a restriction of it to a submodule
  CMatrix similarity;
  MatrixTuple point;  // similarity^{-1} base similarity
  double delta_norm = 0.0;
};

/// Similarity orbits of direct sums of Lambda and of its restrictions to the
/// submodules M_Lambda v.  Sample 0 is Lambda itself.  Candidates that leave
/// V_Lambda or G_delta are dropped, so the result may hold fewer than cfg.count.
std::vector<VarietySample> sample_variety(const AlgebraBasis& basis, const PolyMatrix& delta, const SampleConfig& cfg,
                                          const Tolerances& tol = default_tolerances());

struct SupEstimate {
  double value = 0.0;  // a lower bound for sup ||p0(x)|| over V_Lambda and G_delta
  MatrixTuple witness;
  int samples = 0;
  int climb_steps = 0;
};

/// Largest ||p0(x)|| over sample_variety, then a random hill-climb over the
/// similarity from the three best samples, keeping cond(s) <= kappa.
SupEstimate estimate_sup(const AlgebraBasis& basis, const PolyMatrix& delta, const FreePoly& p0,
                         const SampleConfig& cfg, const Tolerances& tol = default_tolerances());

}  // namespace freepick
