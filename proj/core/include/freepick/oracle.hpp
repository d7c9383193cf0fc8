#pragma once

#include <optional>
#include <vector>

#include "freepick/numerics.hpp"

namespace freepick {

/// Classical scalar Nevanlinna-Pick data: nodes in the open unit disk.
struct ScalarPickData {
  std::vector<Complex> z;
  std::vector<Complex> w;
  void validate() const;  // DomainError on |z| >= 1 or coincident nodes
};

/// [(1 - conj(w_i) w_j) / (1 - conj(z_i) z_j)].
CMatrix pick_matrix(const ScalarPickData& data);

/// Smallest eigenvalue of the Pick matrix.
double pick_min_eigenvalue(const ScalarPickData& data);

/// A Schur function built by the Schur algorithm:
///   f_0 = f,  f_k(z) = (gamma_k + b_k(z) f_{k+1}(z)) / (1 + conj(gamma_k) b_k(z) f_{k+1}(z)),
/// with b_k(z) = (z - a_k) / (1 - conj(a_k) z) and a constant tail f_N = tail.
class SchurFunction {
 public:
  struct Step {
    Complex node;
    Complex gamma;
  };

  SchurFunction(std::vector<Step> steps, Complex tail) : steps_(std::move(steps)), tail_(tail) {}

  Complex operator()(Complex z) const;
  const std::vector<Step>& steps() const noexcept { return steps_; }
  Complex tail() const noexcept { return tail_; }

 private:
  std::vector<Step> steps_;
  Complex tail_;
};

/// Runs the Schur recursion.  Returns nullopt when some parameter has modulus
/// above 1 + boundary_tol, or a unimodular parameter leaves non-constant data.
std::optional<SchurFunction> schur_solve(const ScalarPickData& data, double boundary_tol = 1e-8);

}  // namespace freepick
