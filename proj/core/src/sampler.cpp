#include "freepick/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>

#include <Eigen/Eigenvalues>

namespace freepick {

Rng::Rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  engine_.seed(seq);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  has_spare_ = true;
  return rad * std::cos(ang);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

CMatrix ginibre(int m, Rng& rng) {
  CMatrix g(m, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) g(i, j) = scale * rng.complex_normal();
  }
  return g;
}

namespace {

// Q factor with the phases of R's diagonal moved into Q.
CMatrix unitary_factor(const CMatrix& a) {
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ();
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Stream ids keep the three samplers apart for the same seed.
constexpr std::uint64_t kGdeltaStream = 0;
constexpr std::uint64_t kVarietyStream = 1ULL << 40;
constexpr std::uint64_t kClimbStream = 2ULL << 40;

}  // namespace

CMatrix haar_unitary(int m, Rng& rng) { return unitary_factor(ginibre(m, rng)); }

CMatrix RandomSimilarity::at(double c) const {
  RVector sv(exponents.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) sv(i) = std::pow(kappa, c * exponents(i));
  return u * sv.cast<Complex>().asDiagonal() * v.adjoint();
}

RandomSimilarity random_similarity(int m, double kappa, Rng& rng) {
  RandomSimilarity s;
  s.kappa = kappa;
  s.u = haar_unitary(m, rng);
  s.v = haar_unitary(m, rng);
  s.exponents.resize(m);
  for (int i = 0; i < m; ++i) s.exponents(i) = rng.uniform();
  return s;
}

void SampleConfig::validate() const {
  if (!(kappa >= 1.0)) throw DomainError("sampler: kappa must be at least 1");
  if (!(shrink > 0.0 && shrink <= 1.0)) throw DomainError("sampler: shrink must lie in (0, 1]");
  if (max_size < 1) throw DomainError("sampler: max_size must be positive");
  if (count < 0) throw DomainError("sampler: count must be nonnegative");
}

// ---------------------------------------------------------------- G_delta

namespace {

std::optional<MatrixTuple> draw_gdelta(const PolyMatrix& delta, int max_size, Rng& rng) {
  const int m = rng.uniform_int(1, max_size);
  std::vector<CMatrix> mats;
  for (int r = 0; r < delta.dims(); ++r) mats.push_back(ginibre(m, rng));
  const MatrixTuple raw(std::move(mats));
  const double target = rng.uniform(0.5, 0.99);

  auto norm_at = [&](double t) { return op_norm(eval_matrix(delta, raw.scaled(t))); };
  if (!(norm_at(0.0) < target)) return std::nullopt;
  double lo = 0.0;
  double hi = 1.0;
  int grow = 0;
  while (norm_at(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 60) return std::nullopt;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (norm_at(mid) < target ? lo : hi) = mid;
  }
  MatrixTuple x = raw.scaled(lo);
  const double dn = op_norm(eval_matrix(delta, x));
  if (dn < 0.5 - 1e-9 || dn > 0.99) return std::nullopt;
  return x;
}

}  // namespace

std::vector<MatrixTuple> sample_gdelta(const PolyMatrix& delta, const SampleConfig& cfg) {
  cfg.validate();
  if (!delta.square()) throw DimensionError("sample_gdelta: delta must be square");
  std::vector<MatrixTuple> out(static_cast<std::size_t>(cfg.count));
  parallel_for(cfg.count, cfg.threads, [&](int i) {
    Rng rng(cfg.seed, kGdeltaStream + static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt < 100; ++attempt) {
      if (auto x = draw_gdelta(delta, cfg.max_size, rng)) {
        out[static_cast<std::size_t>(i)] = std::move(*x);
        return;
      }
    }
    throw NumericsError("sample_gdelta: no admissible scaling after 100 draws");
  });
  return out;
}

// ---------------------------------------------------------------- V_Lambda

namespace {

MatrixTuple repeat_sum(const MatrixTuple& x, int k) {
  MatrixTuple out = x;
  for (int i = 1; i < k; ++i) out = direct_sum(out, x);
  return out;
}

// Restriction of Lambda to M_Lambda v for an eigenvector v of a random element of M_Lambda.
MatrixTuple submodule_restriction(const AlgebraBasis& basis, Rng& rng, double rank_tol) {
  const int n = basis.n();
  CMatrix elem = CMatrix::Zero(n, n);
  for (const CMatrix& b : basis.basis_mats) elem += rng.complex_normal() * b;
  Eigen::ComplexEigenSolver<CMatrix> es(elem);
  CVector v;
  if (es.info() == Eigen::Success && rng.uniform() < 0.75) {
    v = es.eigenvectors().col(rng.uniform_int(0, n - 1));
  } else {
    v = CVector(n);
    for (int i = 0; i < n; ++i) v(i) = rng.complex_normal();
  }
  CMatrix span(n, basis.dim());
  for (int k = 0; k < basis.dim(); ++k) span.col(k) = basis.basis_mats[static_cast<std::size_t>(k)] * v;
  return basis.point.compress(range_basis(span, rank_tol));
}

std::optional<VarietySample> draw_variety(const AlgebraBasis& basis, const PolyMatrix& delta,
                                          const SampleConfig& cfg, const Tolerances& tol, int index) {
  const int n = basis.n();
  if (index == 0) {
    const GdeltaTest g = in_gdelta(delta, basis.point);
    if (!g.inside) return std::nullopt;
    return VarietySample{basis.point, CMatrix::Identity(n, n), basis.point, g.norm};
  }
  Rng rng(cfg.seed, kVarietyStream + static_cast<std::uint64_t>(index));
  MatrixTuple unit = index % 2 == 1 ? basis.point : submodule_restriction(basis, rng, tol.rank);
  const int size = unit.size();
  const int k = rng.uniform_int(1, std::max(1, cfg.max_size / size));
  MatrixTuple base = repeat_sum(unit, k);
  const RandomSimilarity sim = random_similarity(base.size(), cfg.kappa, rng);

  double c = 1.0;
  for (int shrink_step = 0; shrink_step <= 60; ++shrink_step) {
    const CMatrix s = sim.at(c);
    MatrixTuple x = base.similar(s);
    const GdeltaTest g = in_gdelta(delta, x);
    if (g.inside) {
      if (!in_variety(basis, x, tol.variety)) return std::nullopt;
      return VarietySample{std::move(base), s, std::move(x), g.norm};
    }
    c = shrink_step == 59 ? 0.0 : c * cfg.shrink;
    if (cfg.shrink == 1.0) c = 0.0;
  }
  return std::nullopt;
}

}  // namespace

std::vector<VarietySample> sample_variety(const AlgebraBasis& basis, const PolyMatrix& delta,
                                          const SampleConfig& cfg, const Tolerances& tol) {
  cfg.validate();
  if (delta.dims() != basis.d()) throw DimensionError("sample_variety: delta and Lambda differ in d");
  std::vector<std::optional<VarietySample>> slots(static_cast<std::size_t>(cfg.count));
  parallel_for(cfg.count, cfg.threads,
               [&](int i) { slots[static_cast<std::size_t>(i)] = draw_variety(basis, delta, cfg, tol, i); });
  std::vector<VarietySample> out;
  for (auto& s : slots) {
    if (s) out.push_back(std::move(*s));
  }
  return out;
}

// ---------------------------------------------------------------- sup estimate

namespace {

double condition_number(const CMatrix& s) {
  Eigen::JacobiSVD<CMatrix> svd(s);
  const RVector& sv = svd.singularValues();
  return sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
}

struct ClimbResult {
  double value = 0.0;
  MatrixTuple point;
  int steps = 0;
};

ClimbResult climb(const VarietySample& start, const PolyMatrix& delta, const FreePoly& p0, double kappa, Rng& rng,
                  int max_steps) {
  ClimbResult best{op_norm(eval(p0, start.point)), start.point, 0};
  CMatrix s = start.similarity;
  const int m = start.base.size();
  double eta = 0.1;
  for (int step = 0; step < max_steps && eta > 1e-8; ++step) {
    ++best.steps;
    const CMatrix trial = s + eta * op_norm(s) * ginibre(m, rng);
    if (!(condition_number(trial) <= kappa)) {
      eta *= 0.5;
      continue;
    }
    MatrixTuple x = start.base.similar(trial);
    if (!in_gdelta(delta, x).inside) {
      eta *= 0.5;
      continue;
    }
    const double value = op_norm(eval(p0, x));
    if (value > best.value) {
      best.value = value;
      best.point = std::move(x);
      s = trial;
      eta = std::min(1.0, eta * 1.5);
    } else {
      eta *= 0.7;
    }
  }
  return best;
}

}  // namespace

SupEstimate estimate_sup(const AlgebraBasis& basis, const PolyMatrix& delta, const FreePoly& p0,
                         const SampleConfig& cfg, const Tolerances& tol) {
  if (p0.dims() != basis.d()) throw DimensionError("estimate_sup: p0 and Lambda differ in d");
  const std::vector<VarietySample> samples = sample_variety(basis, delta, cfg, tol);
  SupEstimate est;
  est.samples = static_cast<int>(samples.size());
  if (samples.empty()) return est;

  std::vector<double> values(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) values[i] = op_norm(eval(p0, samples[i].point));
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  est.value = values[order[0]];
  est.witness = samples[order[0]].point;

  const int starts = static_cast<int>(std::min<std::size_t>(3, order.size()));
  std::vector<ClimbResult> climbs(static_cast<std::size_t>(starts));
  parallel_for(starts, cfg.threads, [&](int j) {
    Rng rng(cfg.seed, kClimbStream + static_cast<std::uint64_t>(j));
    climbs[static_cast<std::size_t>(j)] =
        climb(samples[order[static_cast<std::size_t>(j)]], delta, p0, cfg.kappa, rng, 200);
  });
  for (const ClimbResult& c : climbs) {
    est.climb_steps += c.steps;
    if (c.value > est.value) {
      est.value = c.value;
      est.witness = c.point;
    }
  }
  return est;
}

}  // namespace freepick
