#include "freepick/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>

namespace freepick {

namespace {

Eigen::Map<const CVector> vec(const CMatrix& m) { return {m.data(), m.size()}; }

CMatrix unvec(const CVector& v, int n) {
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

}  // namespace

CVector AlgebraBasis::coordinates(const CMatrix& w) const {
  if (w.rows() != n() || w.cols() != n()) throw DimensionError("coordinates: size mismatch");
  CVector c(dim());
  for (int k = 0; k < dim(); ++k) c(k) = vec(basis_mats[static_cast<std::size_t>(k)]).dot(vec(w));
  return c;
}

std::vector<FreePoly> AlgebraBasis::relation_polys() const {
  std::vector<FreePoly> out;
  for (Eigen::Index c = 0; c < relation_nullspace.cols(); ++c) {
    FreePoly p(d());
    for (std::size_t i = 0; i < relation_words.size(); ++i) {
      const Complex coef = relation_nullspace(static_cast<Eigen::Index>(i), c);
      if (coef != Complex(0.0)) p += FreePoly::monomial(d(), relation_words[i], coef);
    }
    out.push_back(std::move(p));
  }
  return out;
}

AlgebraBasis compute_algebra(const MatrixTuple& lambda, const Tolerances& tol) {
  const int n = lambda.size();
  const int d = lambda.dims();
  const int max_dim = n * n;

  std::vector<double> letter_norm;
  for (int r = 0; r < d; ++r) letter_norm.push_back(op_norm(lambda[r]));

  AlgebraBasis out;
  out.point = lambda;

  struct Candidate {
    Word word;
    CMatrix value;
    double scale;  // sqrt(n) times the product of letter norms
  };
  std::deque<Candidate> queue;
  std::set<Word, DegLex> seen;
  std::vector<FreePoly> rewrite_relations;

  queue.push_back({Word{}, CMatrix::Identity(n, n), std::sqrt(static_cast<double>(n))});
  seen.insert(Word{});
  out.relation_words.push_back(Word{});

  while (!queue.empty()) {
    Candidate cand = std::move(queue.front());
    queue.pop_front();

    const int k_now = out.dim();
    CVector v = vec(cand.value);
    CVector coef = CVector::Zero(k_now);
    CVector resid = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (int k = 0; k < k_now; ++k) {
        const Complex c = vec(out.basis_mats[static_cast<std::size_t>(k)]).dot(resid);
        coef(k) += c;
        resid -= c * vec(out.basis_mats[static_cast<std::size_t>(k)]);
      }
    }
    const double rnorm = resid.norm();

    FreePoly combo = FreePoly::monomial(d, cand.word);
    for (int k = 0; k < k_now; ++k) {
      combo -= coef(k) * out.word_expansions[static_cast<std::size_t>(k)];
    }

    if (k_now < max_dim && cand.scale > 0.0 && rnorm > tol.rank * cand.scale) {
      out.basis_mats.push_back(unvec(resid / rnorm, n));
      out.word_expansions.push_back(combo * Complex(1.0 / rnorm));
      out.pivot_words.push_back(cand.word);
      out.closure_degree = std::max(out.closure_degree, static_cast<int>(cand.word.length()));
      for (int r = 0; r < d; ++r) {
        Word right = cand.word * Word::letter(r);
        if (seen.insert(right).second) {
          out.relation_words.push_back(right);
          queue.push_back({right, cand.value * lambda[r], cand.scale * letter_norm[static_cast<std::size_t>(r)]});
        }
        Word left = Word::letter(r) * cand.word;
        if (seen.insert(left).second) {
          out.relation_words.push_back(left);
          queue.push_back({left, lambda[r] * cand.value, cand.scale * letter_norm[static_cast<std::size_t>(r)]});
        }
      }
    } else {
      rewrite_relations.push_back(std::move(combo));
    }
  }

  // Word -> vec(word(Lambda)) over every word touched by the closure.
  const auto nwords = static_cast<Eigen::Index>(out.relation_words.size());
  {
    std::vector<FreePoly> monos;
    std::vector<const FreePoly*> ptrs;
    monos.reserve(out.relation_words.size());
    for (const auto& w : out.relation_words) monos.push_back(FreePoly::monomial(d, w));
    for (const auto& m : monos) ptrs.push_back(&m);
    std::vector<CMatrix> vals = eval_many(ptrs, lambda);
    out.relation_matrix.resize(n * n, nwords);
    for (Eigen::Index i = 0; i < nwords; ++i) out.relation_matrix.col(i) = vec(vals[static_cast<std::size_t>(i)]);
  }

  // The rewrite relations span the kernel on these words; orthonormalize them.
  CMatrix rel = CMatrix::Zero(nwords, static_cast<Eigen::Index>(rewrite_relations.size()));
  for (std::size_t c = 0; c < rewrite_relations.size(); ++c) {
    for (Eigen::Index i = 0; i < nwords; ++i) {
      rel(i, static_cast<Eigen::Index>(c)) = rewrite_relations[c].coefficient(out.relation_words[static_cast<std::size_t>(i)]);
    }
  }
  if (rel.cols() > 0) {
    Eigen::HouseholderQR<CMatrix> qr(rel);
    out.relation_nullspace = qr.householderQ() * CMatrix::Identity(nwords, rel.cols());
  } else {
    out.relation_nullspace = CMatrix(nwords, 0);
  }

  out.variety_checks = out.relation_polys();
  const int k = out.dim();
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const CMatrix prod = out.basis_mats[static_cast<std::size_t>(i)] * out.basis_mats[static_cast<std::size_t>(j)];
      const CVector c = out.coordinates(prod);
      FreePoly rel = out.word_expansions[static_cast<std::size_t>(i)] * out.word_expansions[static_cast<std::size_t>(j)];
      for (int m = 0; m < k; ++m) rel -= c(m) * out.word_expansions[static_cast<std::size_t>(m)];
      // Cancellation leaves rounding residue; drop it relative to the largest coefficient.
      double top = 0.0;
      for (const auto& [w, a] : rel.terms()) top = std::max(top, std::abs(a));
      FreePoly::Terms kept;
      for (const auto& [w, a] : rel.terms()) {
        if (std::abs(a) > tol.rank * std::max(1.0, top)) kept.emplace(w, a);
      }
      if (!kept.empty()) out.variety_checks.emplace_back(d, std::move(kept));
    }
  }
  return out;
}

std::optional<FreePoly> membership(const AlgebraBasis& basis, const CMatrix& w, double tol) {
  if (w.rows() != basis.n() || w.cols() != basis.n()) {
    throw DimensionError("membership: W must be " + std::to_string(basis.n()) + "x" + std::to_string(basis.n()));
  }
  require_finite(w, "membership");
  const CVector c = basis.coordinates(w);
  CMatrix proj = CMatrix::Zero(basis.n(), basis.n());
  for (int k = 0; k < basis.dim(); ++k) proj += c(k) * basis.basis_mats[static_cast<std::size_t>(k)];
  const double scale = std::max(1.0, w.norm());
  if ((w - proj).norm() > tol * scale) return std::nullopt;

  FreePoly p0(basis.d());
  for (int k = 0; k < basis.dim(); ++k) p0 += c(k) * basis.word_expansions[static_cast<std::size_t>(k)];
  if ((eval(p0, basis.point) - w).norm() > tol * scale) return std::nullopt;
  return p0;
}

double variety_residual(const AlgebraBasis& basis, const MatrixTuple& x) {
  if (x.dims() != basis.d()) throw DimensionError("in_variety: variable counts differ");
  // One shared cache for every word occurring in any check.
  std::set<Word, DegLex> words;
  for (const FreePoly& p : basis.variety_checks) {
    for (const auto& [w, c] : p.terms()) words.insert(w);
  }
  std::vector<FreePoly> monos;
  monos.reserve(words.size());
  for (const auto& w : words) monos.push_back(FreePoly::monomial(basis.d(), w));
  std::vector<const FreePoly*> ptrs;
  for (const auto& m : monos) ptrs.push_back(&m);
  const std::vector<CMatrix> vals = eval_many(ptrs, x);
  std::map<Word, std::size_t, DegLex> index;
  std::size_t i = 0;
  for (const auto& w : words) index.emplace(w, i++);

  double worst = 0.0;
  for (const FreePoly& p : basis.variety_checks) {
    CMatrix value = CMatrix::Zero(x.size(), x.size());
    double bound = 0.0;
    for (const auto& [w, c] : p.terms()) {
      const CMatrix& wx = vals[index.at(w)];
      value += c * wx;
      bound += std::abs(c) * wx.norm();
    }
    const double v = value.norm();
    worst = std::max(worst, bound > 0.0 ? v / bound : v);
  }
  return worst;
}

bool in_variety(const AlgebraBasis& basis, const MatrixTuple& x, double tol) {
  return variety_residual(basis, x) <= tol;
}

}  // namespace freepick
