#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freepick/numerics.hpp"

namespace freepick {

/// A monomial in non-commuting letters.  Letters are stored 0-based
/// (letter r prints as x<r+1>); the empty word is the unit.
class Word {
 public:
  Word() = default;
  Word(std::initializer_list<int> letters) : letters_(letters) {}
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}

  static Word letter(int r) { return Word({r}); }

  const std::vector<int>& letters() const noexcept { return letters_; }
  std::size_t length() const noexcept { return letters_.size(); }
  bool empty() const noexcept { return letters_.empty(); }
  int max_letter() const noexcept;

  friend Word operator*(const Word& a, const Word& b);
  friend bool operator==(const Word&, const Word&) = default;

  std::string to_string() const;

 private:
  std::vector<int> letters_;
};

/// Degree-lexicographic order: shorter words first, then lexicographic letters.
struct DegLex {
  bool operator()(const Word& a, const Word& b) const noexcept;
};

/// A d-tuple of n x n complex matrices: a point of M_n^d.
class MatrixTuple {
 public:
  MatrixTuple() = default;
  explicit MatrixTuple(std::vector<CMatrix> mats);
  MatrixTuple(int n, int d);  // zero tuple

  int size() const noexcept { return n_; }
  int dims() const noexcept { return static_cast<int>(mats_.size()); }
  const CMatrix& operator[](int r) const { return mats_.at(static_cast<std::size_t>(r)); }
  const std::vector<CMatrix>& mats() const noexcept { return mats_; }

  /// s^{-1} x s applied to every coordinate.
  MatrixTuple similar(const CMatrix& s) const;
  MatrixTuple scaled(double t) const;
  /// Restriction to the range of an isometry q: q* x q.
  MatrixTuple compress(const CMatrix& q) const;

 private:
  int n_ = 0;
  std::vector<CMatrix> mats_;
};

MatrixTuple direct_sum(const MatrixTuple& x, const MatrixTuple& y);

/// The Jordan-type block tuple [[a, h], [0, a]] used for directional derivatives.
MatrixTuple jordan_fold(const MatrixTuple& a, const MatrixTuple& h);

/// A free polynomial in d variables with complex coefficients.
class FreePoly {
 public:
  using Terms = std::map<Word, Complex, DegLex>;

  FreePoly() = default;
  explicit FreePoly(int d) : d_(d) {}
  FreePoly(int d, Terms terms);

  static FreePoly constant(int d, Complex c);
  static FreePoly one(int d) { return constant(d, 1.0); }
  static FreePoly variable(int d, int r);  // r is 0-based
  static FreePoly monomial(int d, const Word& w, Complex c = 1.0);

  int dims() const noexcept { return d_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  /// Longest stored word; -1 for the zero polynomial.
  int degree() const noexcept;
  Complex coefficient(const Word& w) const;

  FreePoly& operator+=(const FreePoly& other);
  FreePoly& operator-=(const FreePoly& other);
  FreePoly& operator*=(Complex c);

  friend FreePoly operator+(FreePoly a, const FreePoly& b) { return a += b; }
  friend FreePoly operator-(FreePoly a, const FreePoly& b) { return a -= b; }
  friend FreePoly operator-(FreePoly a) { return a *= -1.0; }
  friend FreePoly operator*(FreePoly a, Complex c) { return a *= c; }
  friend FreePoly operator*(Complex c, FreePoly a) { return a *= c; }
  friend FreePoly operator*(const FreePoly& a, const FreePoly& b);

  /// Grammar string in degree-lexicographic term order; parse(to_string()) == *this.
  std::string to_string() const;

 private:
  void normalize();

  int d_ = 0;
  Terms terms_;
};

/// Parse the polynomial grammar: x1..x<d>, + - * ^, parentheses, complex
/// literals (a, bi, a+bi).  Multiplication needs an explicit '*'.
FreePoly parse_poly(std::string_view text, int d);

/// p(x): letter r -> x^r, empty word -> identity.
CMatrix eval(const FreePoly& p, const MatrixTuple& x);

/// Evaluate many polynomials at one point, sharing word products.
std::vector<CMatrix> eval_many(const std::vector<const FreePoly*>& ps, const MatrixTuple& x);

/// Matrix of free polynomials, all over the same d.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(int rows, int cols, int d);
  PolyMatrix(int rows, int cols, std::vector<FreePoly> entries);

  /// delta = [x1]
  static PolyMatrix scalar_variable(int d = 1);
  /// diag(x1, ..., xd): the polydisk.
  static PolyMatrix polydisk(int d);
  /// First column x1..xd, zero elsewhere: the row ball.
  static PolyMatrix row_ball(int d);
  static PolyMatrix parse(const std::vector<std::vector<std::string>>& text, int d);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int dims() const noexcept { return d_; }
  bool square() const noexcept { return rows_ == cols_; }
  const FreePoly& operator()(int i, int j) const;
  FreePoly& operator()(int i, int j);

  std::vector<std::vector<std::string>> to_strings() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int d_ = 0;
  std::vector<FreePoly> entries_;
};

/// Block matrix whose (i, j) block is delta_ij(x).
CMatrix eval_matrix(const PolyMatrix& delta, const MatrixTuple& x);

struct GdeltaTest {
  bool inside = false;
  double norm = 0.0;
};

/// ||delta(x)|| and whether it is below 1 - margin.
GdeltaTest in_gdelta(const PolyMatrix& delta, const MatrixTuple& x, double margin = 0.0);

}  // namespace freepick
