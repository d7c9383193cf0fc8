#include "freepick/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace freepick {

namespace {

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string(what) + ": expected a number");
  return j.get<double>();
}

int integer(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw FormatError(std::string("missing integer field '") + key + "'");
  }
  return j.at(key).get<int>();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

Json basis_to_json(const CMatrix& b) { return Json{{"cols", b.cols()}, {"data", matrix_to_json(b)}}; }

CMatrix basis_from_json(const Json& j, Eigen::Index rows) {
  return matrix_from_json(field(j, "data"), rows, integer(j, "cols"));
}

}  // namespace

Json matrix_to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
  }
  return out;
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw FormatError("complex entry must be [re, im]");
  const Complex z(number(j[0], "real part"), number(j[1], "imaginary part"));
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw FormatError("non-finite complex entry");
  return z;
}

CMatrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) throw FormatError("matrix must be an array of [re, im] pairs");
  if (static_cast<Eigen::Index>(j.size()) != rows * cols) {
    throw FormatError("matrix has " + std::to_string(j.size()) + " entries, expected " +
                      std::to_string(rows * cols));
  }
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[static_cast<std::size_t>(i * cols + k)]);
  }
  return m;
}

CMatrix square_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("matrix must be an array of [re, im] pairs");
  const auto count = static_cast<Eigen::Index>(j.size());
  auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(count))));
  if (n * n != count || n == 0) throw FormatError("square matrix expected, got " + std::to_string(count) + " entries");
  return matrix_from_json(j, n, n);
}

Json tuple_to_json(const MatrixTuple& x) {
  Json mats = Json::array();
  for (int r = 0; r < x.dims(); ++r) mats.push_back(matrix_to_json(x[r]));
  return mats;
}

MatrixTuple tuple_from_json(const Json& j, int d) {
  const Json& arr = j.is_object() ? field(j, "X") : j;
  if (!arr.is_array()) throw FormatError("matrix tuple must be an array of matrices");
  if (static_cast<int>(arr.size()) != d) {
    throw FormatError("matrix tuple has " + std::to_string(arr.size()) + " matrices, expected " + std::to_string(d));
  }
  std::vector<CMatrix> mats;
  for (const Json& m : arr) mats.push_back(square_from_json(m));
  return MatrixTuple(std::move(mats));
}

Json delta_to_json(const PolyMatrix& delta) { return Json(delta.to_strings()); }

PolyMatrix delta_from_json(const Json& j, int d) {
  if (!j.is_array() || j.empty()) throw FormatError("delta must be a nonempty array of rows");
  std::vector<std::vector<std::string>> text;
  for (const Json& row : j) {
    if (!row.is_array()) throw FormatError("delta rows must be arrays of strings");
    std::vector<std::string> r;
    for (const Json& e : row) {
      if (!e.is_string()) throw FormatError("delta entries must be polynomial strings");
      r.push_back(e.get<std::string>());
    }
    text.push_back(std::move(r));
  }
  return PolyMatrix::parse(text, d);
}

Json problem_to_json(const PickProblem& p) {
  Json pts = Json::array();
  for (const PickPoint& pt : p.points) pts.push_back(Json{{"X", tuple_to_json(pt.x)}, {"W", matrix_to_json(pt.w)}});
  return Json{{"d", p.d}, {"delta", delta_to_json(p.delta)}, {"points", pts}};
}

PickProblem problem_from_json(const Json& j) {
  PickProblem p;
  p.d = integer(j, "d");
  if (p.d < 1) throw FormatError("d must be positive");
  p.delta = delta_from_json(field(j, "delta"), p.d);
  const Json& pts = field(j, "points");
  if (!pts.is_array()) throw FormatError("points must be an array");
  for (const Json& pt : pts) {
    PickPoint q;
    q.x = tuple_from_json(field(pt, "X"), p.d);
    q.w = square_from_json(field(pt, "W"));
    p.points.push_back(std::move(q));
  }
  return p;
}

Json realization_to_json(const Realization& r, double scale) {
  Json out{{"delta", delta_to_json(r.delta)},
           {"d", r.delta.dims()},
           {"dims", {{"J", r.J()}, {"L_dim", r.L_dim}, {"n", r.io_dim}}},
           {"A", matrix_to_json(r.A)},
           {"B", matrix_to_json(r.B)},
           {"C", matrix_to_json(r.C)},
           {"D", matrix_to_json(r.D)}};
  if (scale != 1.0) out["scale"] = scale;
  return out;
}

StoredRealization realization_from_json(const Json& j) {
  StoredRealization s;
  const int d = integer(j, "d");
  s.r.delta = delta_from_json(field(j, "delta"), d);
  const Json& dims = field(j, "dims");
  const int J = integer(dims, "J");
  if (J != s.r.delta.rows()) throw FormatError("realization: dims.J disagrees with delta");
  s.r.L_dim = integer(dims, "L_dim");
  s.r.io_dim = integer(dims, "n");
  if (s.r.L_dim < 0 || s.r.io_dim < 1) throw FormatError("realization: bad dims");
  const int st = J * s.r.L_dim;
  s.r.A = matrix_from_json(field(j, "A"), s.r.io_dim, s.r.io_dim);
  s.r.B = matrix_from_json(field(j, "B"), s.r.io_dim, st);
  s.r.C = matrix_from_json(field(j, "C"), st, s.r.io_dim);
  s.r.D = matrix_from_json(field(j, "D"), st, st);
  if (j.contains("scale")) s.scale = number(j.at("scale"), "scale");
  return s;
}

Json certificate_to_json(const GramCertificate& c) {
  Json u = Json::array();
  for (const auto& row : c.u_polys) {
    Json slots = Json::array();
    for (const FreePoly& p : row) slots.push_back(p.to_string());
    u.push_back(slots);
  }
  return Json{{"n", c.n},
              {"d", c.d},
              {"J", c.J},
              {"K", c.K},
              {"N0", c.N0},
              {"Q", matrix_to_json(c.gram)},
              {"factor", matrix_to_json(c.factor)},
              {"u_polys", u},
              {"residual", c.residual},
              {"stage", c.stage},
              {"iterations", c.iterations}};
}

GramCertificate certificate_from_json(const Json& j) {
  GramCertificate c;
  c.n = integer(j, "n");
  c.d = integer(j, "d");
  c.J = integer(j, "J");
  c.K = integer(j, "K");
  c.N0 = integer(j, "N0");
  if (c.N0 != c.J * c.K) throw FormatError("certificate: N0 != J K");
  c.gram = matrix_from_json(field(j, "Q"), c.N0, c.N0);
  const Json& f = field(j, "factor");
  c.factor = matrix_from_json(f, static_cast<Eigen::Index>(f.size()) / std::max(1, c.N0), c.N0);
  for (const Json& row : field(j, "u_polys")) {
    std::vector<FreePoly> slots;
    for (const Json& s : row) slots.push_back(parse_poly(s.get<std::string>(), c.d));
    c.u_polys.push_back(std::move(slots));
  }
  c.residual = number(field(j, "residual"), "residual");
  if (j.contains("stage")) c.stage = j.at("stage").get<std::string>();
  if (j.contains("iterations")) c.iterations = j.at("iterations").get<int>();
  return c;
}

Json parametrization_to_json(const NevanlinnaData& nd) {
  return Json{{"dims", {{"ambient", nd.ambient}, {"mu", nd.mu}}},
              {"N1", basis_to_json(nd.n1)},
              {"N2", basis_to_json(nd.n2)},
              {"M1", basis_to_json(nd.e1)},
              {"M2", basis_to_json(nd.e2)},
              {"V", matrix_to_json(nd.v)},
              {"U", matrix_to_json(nd.u)},
              {"theta_colligation", matrix_to_json(nd.theta_colligation)},
              {"G", realization_to_json(nd.g)}};
}

NevanlinnaData parametrization_from_json(const Json& j) {
  NevanlinnaData nd;
  const Json& dims = field(j, "dims");
  nd.ambient = integer(dims, "ambient");
  nd.mu = integer(dims, "mu");
  nd.n1 = basis_from_json(field(j, "N1"), nd.ambient);
  nd.n2 = basis_from_json(field(j, "N2"), nd.ambient);
  nd.e1 = basis_from_json(field(j, "M1"), nd.ambient);
  nd.e2 = basis_from_json(field(j, "M2"), nd.ambient);
  if (nd.e1.cols() != nd.mu || nd.e2.cols() != nd.mu) throw FormatError("parametrization: mu disagrees with bases");
  nd.v = matrix_from_json(field(j, "V"), nd.ambient, nd.ambient);
  nd.u = matrix_from_json(field(j, "U"), nd.ambient + nd.mu, nd.ambient + nd.mu);
  nd.theta_colligation = matrix_from_json(field(j, "theta_colligation"), nd.mu, nd.mu);
  nd.g = realization_from_json(field(j, "G")).r;
  if (nd.g.io_dim != 1 + nd.mu) throw FormatError("parametrization: G has the wrong io dimension");
  return nd;
}

Json sample_dump_to_json(const std::vector<SampleRecord>& samples, std::uint64_t seed) {
  Json arr = Json::array();
  for (const SampleRecord& s : samples) {
    Json rec{{"n", s.x.size()}, {"X", tuple_to_json(s.x)}, {"delta_norm", s.delta_norm}};
    if (s.p0_norm) rec["p0_norm"] = *s.p0_norm;
    arr.push_back(std::move(rec));
  }
  return Json{{"seed", seed}, {"count", samples.size()}, {"samples", arr}};
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace freepick
