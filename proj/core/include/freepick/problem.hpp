#pragma once

#include <vector>

#include "freepick/freepoly.hpp"

namespace freepick {

struct PickPoint {
  MatrixTuple x;
  CMatrix w;
};

/// A Pick problem on G_delta.  Several points are folded into one by direct sum.
struct PickProblem {
  int d = 0;
  PolyMatrix delta;
  std::vector<PickPoint> points;

  /// Lambda = (+) x_i and W = (+) w_i.
  PickPoint fold() const;
  /// Shapes agree and entries are finite.
  void validate_shapes() const;
  /// validate_shapes() and ||delta(Lambda)|| < 1 - margin.
  void validate(double margin = 0.0) const;
};

}  // namespace freepick
