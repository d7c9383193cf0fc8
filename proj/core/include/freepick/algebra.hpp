#pragma once

#include <optional>
#include <vector>

#include "freepick/freepoly.hpp"

namespace freepick {

/// The unital algebra M_Lambda = { p(Lambda) : p free polynomial } together
/// with a finite presentation of the relations p(Lambda) = 0.
///
/// basis_mats are orthonormal under <A, B> = tr(A* B).  word_expansions[k]
/// evaluates at Lambda to basis_mats[k].  Every word reached while closing the
/// span (pivot words and their one-letter extensions on both sides) appears in
/// relation_words; relation_nullspace holds an orthonormal basis of the kernel
/// of word -> vec(word(Lambda)) restricted to those words.
struct AlgebraBasis {
  MatrixTuple point;
  std::vector<CMatrix> basis_mats;
  std::vector<FreePoly> word_expansions;
  std::vector<Word> pivot_words;
  int closure_degree = 0;

  std::vector<Word> relation_words;
  CMatrix relation_matrix;    // n^2 x relation_words.size()
  CMatrix relation_nullspace;  // relation_words.size() x (#relations), orthonormal columns

  /// Relation polynomials (nullspace columns) followed by the product relations
  /// e_i e_j - sum_k c_k e_k; in_variety evaluates all of them.
  std::vector<FreePoly> variety_checks;

  int dim() const noexcept { return static_cast<int>(basis_mats.size()); }
  int n() const noexcept { return point.size(); }
  int d() const noexcept { return point.dims(); }

  /// Coordinates of w in the orthonormal basis (trace inner products).
  CVector coordinates(const CMatrix& w) const;
  /// The relation polynomials read off relation_nullspace.
  std::vector<FreePoly> relation_polys() const;
};

/// Closure iteration from the empty word: extend every new pivot by one letter
/// on the right and on the left until a full sweep adds nothing.
AlgebraBasis compute_algebra(const MatrixTuple& lambda, const Tolerances& tol = default_tolerances());

/// p0 with p0(Lambda) = W when W lies in M_Lambda within tol (relative to
/// max(1, ||W||_F)); nullopt otherwise.
std::optional<FreePoly> membership(const AlgebraBasis& basis, const CMatrix& w, double tol);

/// Whether x lies in the free variety V_Lambda: every relation of the closure
/// presentation, and every product relation e_i e_j - (e_i e_j)(Lambda) read in the
/// basis, vanishes at x within tol relative to the size of its terms.
bool in_variety(const AlgebraBasis& basis, const MatrixTuple& x, double tol);

/// Largest relative relation residual at x (the quantity in_variety thresholds).
double variety_residual(const AlgebraBasis& basis, const MatrixTuple& x);

}  // namespace freepick
