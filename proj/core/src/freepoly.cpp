#include "freepick/freepoly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <unordered_map>

namespace freepick {

namespace {

constexpr double kDropBelow = 1e-14;

std::string format_real(double v) {
  // Shortest fixed-notation text that parses back to the same double.
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

}  // namespace

// ---------------------------------------------------------------- Word

int Word::max_letter() const noexcept {
  int m = -1;
  for (int l : letters_) m = std::max(m, l);
  return m;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<int> out;
  out.reserve(a.length() + b.length());
  out.insert(out.end(), a.letters_.begin(), a.letters_.end());
  out.insert(out.end(), b.letters_.begin(), b.letters_.end());
  return Word(std::move(out));
}

std::string Word::to_string() const {
  if (letters_.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) s += '*';
    s += 'x';
    s += std::to_string(letters_[i] + 1);
  }
  return s;
}

bool DegLex::operator()(const Word& a, const Word& b) const noexcept {
  if (a.length() != b.length()) return a.length() < b.length();
  return a.letters() < b.letters();
}

// ---------------------------------------------------------------- MatrixTuple

MatrixTuple::MatrixTuple(std::vector<CMatrix> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) throw DimensionError("MatrixTuple: need at least one matrix");
  n_ = static_cast<int>(mats_.front().rows());
  for (const auto& m : mats_) {
    if (m.rows() != n_ || m.cols() != n_) {
      throw DimensionError("MatrixTuple: matrices must be square of one common size");
    }
  }
}

MatrixTuple::MatrixTuple(int n, int d) : n_(n), mats_(static_cast<std::size_t>(d), CMatrix::Zero(n, n)) {}

MatrixTuple MatrixTuple::similar(const CMatrix& s) const {
  if (s.rows() != n_ || s.cols() != n_) throw DimensionError("similar: size mismatch");
  Eigen::PartialPivLU<CMatrix> lu(s);
  std::vector<CMatrix> out;
  out.reserve(mats_.size());
  for (const auto& m : mats_) out.push_back(lu.solve(m * s));
  return MatrixTuple(std::move(out));
}

MatrixTuple MatrixTuple::scaled(double t) const {
  std::vector<CMatrix> out;
  for (const auto& m : mats_) out.push_back(t * m);
  return MatrixTuple(std::move(out));
}

MatrixTuple MatrixTuple::compress(const CMatrix& q) const {
  if (q.rows() != n_) throw DimensionError("compress: size mismatch");
  std::vector<CMatrix> out;
  for (const auto& m : mats_) out.push_back(q.adjoint() * m * q);
  return MatrixTuple(std::move(out));
}

MatrixTuple direct_sum(const MatrixTuple& x, const MatrixTuple& y) {
  if (x.dims() != y.dims()) throw DimensionError("direct_sum: variable counts differ");
  std::vector<CMatrix> out;
  for (int r = 0; r < x.dims(); ++r) out.push_back(block_diag(x[r], y[r]));
  return MatrixTuple(std::move(out));
}

MatrixTuple jordan_fold(const MatrixTuple& a, const MatrixTuple& h) {
  if (a.dims() != h.dims() || a.size() != h.size()) {
    throw DimensionError("jordan_fold: tuples must share size and variable count");
  }
  const int n = a.size();
  std::vector<CMatrix> out;
  for (int r = 0; r < a.dims(); ++r) {
    CMatrix m = CMatrix::Zero(2 * n, 2 * n);
    m.topLeftCorner(n, n) = a[r];
    m.topRightCorner(n, n) = h[r];
    m.bottomRightCorner(n, n) = a[r];
    out.push_back(std::move(m));
  }
  return MatrixTuple(std::move(out));
}

// ---------------------------------------------------------------- FreePoly

FreePoly::FreePoly(int d, Terms terms) : d_(d), terms_(std::move(terms)) {
  for (const auto& [w, c] : terms_) {
    if (w.max_letter() >= d_) throw DimensionError("FreePoly: letter index exceeds d");
  }
  normalize();
}

FreePoly FreePoly::constant(int d, Complex c) {
  Terms t;
  t.emplace(Word{}, c);
  return FreePoly(d, std::move(t));
}

FreePoly FreePoly::variable(int d, int r) { return monomial(d, Word::letter(r)); }

FreePoly FreePoly::monomial(int d, const Word& w, Complex c) {
  Terms t;
  t.emplace(w, c);
  return FreePoly(d, std::move(t));
}

int FreePoly::degree() const noexcept {
  int deg = -1;
  for (const auto& [w, c] : terms_) deg = std::max(deg, static_cast<int>(w.length()));
  return deg;
}

Complex FreePoly::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

void FreePoly::normalize() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) < kDropBelow; });
}

FreePoly& FreePoly::operator+=(const FreePoly& other) {
  if (other.d_ != d_) throw DimensionError("FreePoly: variable counts differ");
  for (const auto& [w, c] : other.terms_) terms_[w] += c;
  normalize();
  return *this;
}

FreePoly& FreePoly::operator-=(const FreePoly& other) {
  if (other.d_ != d_) throw DimensionError("FreePoly: variable counts differ");
  for (const auto& [w, c] : other.terms_) terms_[w] -= c;
  normalize();
  return *this;
}

FreePoly& FreePoly::operator*=(Complex c) {
  for (auto& [w, v] : terms_) v *= c;
  normalize();
  return *this;
}

FreePoly operator*(const FreePoly& a, const FreePoly& b) {
  if (a.d_ != b.d_) throw DimensionError("FreePoly: variable counts differ");
  FreePoly out(a.d_);
  for (const auto& [wa, ca] : a.terms_) {
    for (const auto& [wb, cb] : b.terms_) out.terms_[wa * wb] += ca * cb;
  }
  out.normalize();
  return out;
}

std::string FreePoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [w, c] : terms_) {
    const double re = c.real();
    const double im = c.imag();
    bool negative = false;
    std::string coeff;
    if (im == 0.0) {
      negative = re < 0.0;
      const double mag = std::abs(re);
      if (!(mag == 1.0 && !w.empty())) coeff = format_real(mag);
    } else if (re == 0.0) {
      negative = im < 0.0;
      coeff = format_real(std::abs(im)) + "i";
    } else {
      coeff = "(" + format_real(re) + (im < 0.0 ? "-" : "+") + format_real(std::abs(im)) + "i)";
    }
    if (first) {
      if (negative) s += "-";
    } else {
      s += negative ? " - " : " + ";
    }
    first = false;
    if (w.empty()) {
      s += coeff.empty() ? "1" : coeff;
    } else {
      if (!coeff.empty()) s += coeff + "*";
      s += w.to_string();
    }
  }
  return s;
}

// ---------------------------------------------------------------- evaluation

namespace {

struct WordHash {
  std::size_t operator()(const Word& w) const noexcept {
    std::size_t h = w.length();
    for (int l : w.letters()) h = h * 1000003u + static_cast<std::size_t>(l + 1);
    return h;
  }
};

class WordCache {
 public:
  explicit WordCache(const MatrixTuple& x) : x_(x) {}

  const CMatrix& get(const Word& w) {
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    CMatrix value;
    if (w.empty()) {
      value = CMatrix::Identity(x_.size(), x_.size());
    } else {
      std::vector<int> prefix(w.letters().begin(), w.letters().end() - 1);
      const CMatrix& head = get(Word(std::move(prefix)));
      value = head * x_[w.letters().back()];
    }
    return cache_.emplace(w, std::move(value)).first->second;
  }

 private:
  const MatrixTuple& x_;
  std::unordered_map<Word, CMatrix, WordHash> cache_;
};

}  // namespace

std::vector<CMatrix> eval_many(const std::vector<const FreePoly*>& ps, const MatrixTuple& x) {
  WordCache cache(x);
  std::vector<CMatrix> out;
  out.reserve(ps.size());
  for (const FreePoly* p : ps) {
    if (p->dims() != x.dims()) {
      throw DimensionError("eval: polynomial has d=" + std::to_string(p->dims()) +
                           " but the tuple has d=" + std::to_string(x.dims()));
    }
    CMatrix acc = CMatrix::Zero(x.size(), x.size());
    for (const auto& [w, c] : p->terms()) acc += c * cache.get(w);
    out.push_back(std::move(acc));
  }
  return out;
}

CMatrix eval(const FreePoly& p, const MatrixTuple& x) { return eval_many({&p}, x).front(); }

// ---------------------------------------------------------------- PolyMatrix

PolyMatrix::PolyMatrix(int rows, int cols, int d)
    : rows_(rows), cols_(cols), d_(d), entries_(static_cast<std::size_t>(rows * cols), FreePoly(d)) {}

PolyMatrix::PolyMatrix(int rows, int cols, std::vector<FreePoly> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (static_cast<int>(entries_.size()) != rows * cols || entries_.empty()) {
    throw DimensionError("PolyMatrix: entry count does not match shape");
  }
  d_ = entries_.front().dims();
  for (const auto& e : entries_) {
    if (e.dims() != d_) throw DimensionError("PolyMatrix: entries over different d");
  }
}

PolyMatrix PolyMatrix::scalar_variable(int d) {
  PolyMatrix m(1, 1, d);
  m(0, 0) = FreePoly::variable(d, 0);
  return m;
}

PolyMatrix PolyMatrix::polydisk(int d) {
  PolyMatrix m(d, d, d);
  for (int r = 0; r < d; ++r) m(r, r) = FreePoly::variable(d, r);
  return m;
}

PolyMatrix PolyMatrix::row_ball(int d) {
  PolyMatrix m(d, d, d);
  for (int r = 0; r < d; ++r) m(r, 0) = FreePoly::variable(d, r);
  return m;
}

PolyMatrix PolyMatrix::parse(const std::vector<std::vector<std::string>>& text, int d) {
  if (text.empty() || text.front().empty()) throw FormatError("delta: empty matrix");
  const int rows = static_cast<int>(text.size());
  const int cols = static_cast<int>(text.front().size());
  std::vector<FreePoly> entries;
  for (const auto& row : text) {
    if (static_cast<int>(row.size()) != cols) throw FormatError("delta: ragged rows");
    for (const auto& cell : row) entries.push_back(parse_poly(cell, d));
  }
  return PolyMatrix(rows, cols, std::move(entries));
}

const FreePoly& PolyMatrix::operator()(int i, int j) const {
  return entries_.at(static_cast<std::size_t>(i * cols_ + j));
}

FreePoly& PolyMatrix::operator()(int i, int j) {
  return entries_.at(static_cast<std::size_t>(i * cols_ + j));
}

std::vector<std::vector<std::string>> PolyMatrix::to_strings() const {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(rows_));
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) out[static_cast<std::size_t>(i)].push_back((*this)(i, j).to_string());
  }
  return out;
}

CMatrix eval_matrix(const PolyMatrix& delta, const MatrixTuple& x) {
  if (delta.dims() != x.dims()) throw DimensionError("eval_matrix: variable counts differ");
  const int n = x.size();
  std::vector<const FreePoly*> ps;
  for (int i = 0; i < delta.rows(); ++i) {
    for (int j = 0; j < delta.cols(); ++j) ps.push_back(&delta(i, j));
  }
  std::vector<CMatrix> vals = eval_many(ps, x);
  CMatrix out(delta.rows() * n, delta.cols() * n);
  for (int i = 0; i < delta.rows(); ++i) {
    for (int j = 0; j < delta.cols(); ++j) {
      out.block(i * n, j * n, n, n) = vals[static_cast<std::size_t>(i * delta.cols() + j)];
    }
  }
  return out;
}

GdeltaTest in_gdelta(const PolyMatrix& delta, const MatrixTuple& x, double margin) {
  GdeltaTest t;
  t.norm = op_norm(eval_matrix(delta, x));
  t.inside = t.norm < 1.0 - margin;
  return t;
}

}  // namespace freepick
