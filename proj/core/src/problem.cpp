#include "freepick/problem.hpp"

namespace freepick {

PickPoint PickProblem::fold() const {
  if (points.empty()) throw DomainError("problem has no points");
  PickPoint out = points.front();
  for (std::size_t i = 1; i < points.size(); ++i) {
    out.x = direct_sum(out.x, points[i].x);
    out.w = block_diag(out.w, points[i].w);
  }
  return out;
}

void PickProblem::validate_shapes() const {
  if (d < 1) throw DomainError("problem: d must be positive");
  if (!delta.square() || delta.rows() < 1) throw DimensionError("problem: delta must be a nonempty square matrix");
  if (delta.dims() != d) throw DimensionError("problem: delta uses a different d");
  if (points.empty()) throw DomainError("problem has no points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PickPoint& p = points[i];
    const std::string where = "problem: point " + std::to_string(i);
    if (p.x.dims() != d) throw DimensionError(where + " has " + std::to_string(p.x.dims()) + " matrices, expected d");
    if (p.w.rows() != p.x.size() || p.w.cols() != p.x.size()) throw DimensionError(where + ": W size differs from X");
    for (int r = 0; r < d; ++r) require_finite(p.x[r], "problem X");
    require_finite(p.w, "problem W");
  }
}

void PickProblem::validate(double margin) const {
  validate_shapes();
  const GdeltaTest g = in_gdelta(delta, fold().x, margin);
  if (!g.inside) {
    throw DomainError("problem: ||delta(Lambda)|| = " + std::to_string(g.norm) + " is not below 1 - margin");
  }
}

}  // namespace freepick
