#include "freepick/oracle.hpp"

#include <cmath>

namespace freepick {

void ScalarPickData::validate() const {
  if (z.size() != w.size()) throw DimensionError("pick data: node and target counts differ");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(std::abs(z[i]) < 1.0)) throw DomainError("pick data: node outside the open unit disk");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(z[i] - z[j]) < 1e-14) throw DomainError("pick data: coincident nodes");
    }
  }
}

CMatrix pick_matrix(const ScalarPickData& data) {
  data.validate();
  const auto n = static_cast<Eigen::Index>(data.z.size());
  CMatrix p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto a = static_cast<std::size_t>(i);
      const auto b = static_cast<std::size_t>(j);
      p(i, j) = (1.0 - std::conj(data.w[a]) * data.w[b]) / (1.0 - std::conj(data.z[a]) * data.z[b]);
    }
  }
  return p;
}

double pick_min_eigenvalue(const ScalarPickData& data) {
  if (data.z.empty()) return 0.0;
  return herm_eig(pick_matrix(data)).values(0);
}

Complex SchurFunction::operator()(Complex z) const {
  Complex f = tail_;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
    const Complex b = (z - it->node) / (1.0 - std::conj(it->node) * z);
    f = (it->gamma + b * f) / (1.0 + std::conj(it->gamma) * b * f);
  }
  return f;
}

std::optional<SchurFunction> schur_solve(const ScalarPickData& data, double boundary_tol) {
  data.validate();
  std::vector<Complex> z = data.z;
  std::vector<Complex> w = data.w;
  std::vector<SchurFunction::Step> steps;

  while (!z.empty()) {
    const Complex a = z.front();
    const Complex gamma = w.front();
    const double mag = std::abs(gamma);
    if (mag > 1.0 + boundary_tol) return std::nullopt;
    if (mag >= 1.0 - boundary_tol) {
      // A unimodular value forces the constant function.
      const Complex unit = gamma / mag;
      for (const Complex& v : w) {
        if (std::abs(v - unit) > std::sqrt(boundary_tol)) return std::nullopt;
      }
      return SchurFunction(std::move(steps), unit);
    }
    steps.push_back({a, gamma});
    std::vector<Complex> nz;
    std::vector<Complex> nw;
    for (std::size_t i = 1; i < z.size(); ++i) {
      const Complex b = (z[i] - a) / (1.0 - std::conj(a) * z[i]);
      nz.push_back(z[i]);
      nw.push_back((w[i] - gamma) / ((1.0 - std::conj(gamma) * w[i]) * b));
    }
    z = std::move(nz);
    w = std::move(nw);
  }
  return SchurFunction(std::move(steps), 0.0);
}

}  // namespace freepick
