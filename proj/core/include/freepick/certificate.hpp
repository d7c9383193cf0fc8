#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freepick/algebra.hpp"

namespace freepick {

/// Real coordinates of an N x N Hermitian matrix that preserve the Frobenius
/// norm: diagonal entries, then sqrt(2) Re and sqrt(2) Im of each upper entry.
class HermitianCoords {
 public:
  explicit HermitianCoords(int dim) : dim_(dim) {}
  int dim() const noexcept { return dim_; }
  int size() const noexcept { return dim_ * dim_; }
  RVector to_vec(const CMatrix& h) const;
  CMatrix from_vec(const RVector& v) const;

 private:
  int dim_;
};

/// Linear description of the Gram-matrix feasibility problem.
///
/// The basis functions F_alpha, alpha = j*K + k, put the k-th algebra basis
/// element in slot j of C^J.  For a Hermitian Gram matrix Q the map
///   L(Q)[(k,m),(l,m')] = sum_{alpha,beta} Q_{alpha beta} sum_j
///       ( conj(F_alpha[jn+k, m]) F_beta[jn+l, m'] - conj(G_alpha[jn+k, m]) G_beta[jn+l, m'] ),
/// G_alpha = delta(Lambda) F_alpha, must hit
///   T[(k,m),(l,m')] = [k==m][l==m'] - conj(W[k,m]) W[l,m'].
/// This is the identity I - p0* s p0 = u* [s - delta* s delta] u for every
/// n x n matrix s, i.e. the Gram equality of the lurking isometry vectors.
struct ConstraintMap {
  int n = 0;
  int d = 0;
  int J = 0;
  int K = 0;
  int N0 = 0;
  CMatrix w;
  std::vector<CMatrix> f_values;  // F_alpha(Lambda), each (J n) x n
  std::vector<CMatrix> g_values;  // delta(Lambda) F_alpha(Lambda)
  std::vector<FreePoly> basis_polys;  // word expansions of the algebra basis

  RMatrix map;      // (n^2)^2 x N0^2 in HermitianCoords on both sides
  RVector target;   // coordinates of T
  RMatrix range_v;  // orthonormal basis of the row space of map
  RVector least_norm;  // minimum-norm least-squares solution of map x = target

  /// L(Q) as an n^2 x n^2 Hermitian matrix.
  CMatrix apply(const CMatrix& q) const;
  double residual(const CMatrix& q) const;
  /// Nearest point of the (least-squares) affine set, in HermitianCoords.
  RVector project_affine(const RVector& x) const;
};

ConstraintMap build_constraint_map(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                                   const Tolerances& tol = default_tolerances());

struct GramCertificate {
  int n = 0;
  int d = 0;
  int J = 0;
  int K = 0;
  int N0 = 0;
  CMatrix gram;    // Q, N0 x N0 Hermitian PSD
  CMatrix factor;  // A with Q = A* A (at most N0 rows)
  /// u_polys[i][j]: slot j of the i-th factor row, sum_k A(i, j*K+k) e_k.
  std::vector<std::vector<FreePoly>> u_polys;
  double residual = 0.0;
  int iterations = 0;
  std::string stage;  // "projections", "polished" or "interior"
  std::vector<double> residual_curve;  // every 100th projection iterate and the final value

  /// u_i(x), i = 0..N0-1, each (J m) x m.
  std::vector<CMatrix> u_values(const std::vector<CMatrix>& basis_values, int m) const;
};

struct FeasibilityOptions {
  double tol = 1e-9;
  int max_iter = 50000;
  /// Stop projecting once the residual has not improved by this factor over
  /// `stall_window` iterations.
  double stall_ratio = 1e-4;
  int stall_window = 2000;
  bool polish = true;
  int polish_iter = 200;
  /// Interior-point iterations used to seed the polish when projections stall.
  int interior_iter = 80;
};

struct FeasibilityResult {
  std::optional<GramCertificate> certificate;  // absent: undecided, likely unsolvable
  double best_residual = 0.0;
  int iterations = 0;
  bool polished = false;
  bool interior_point = false;
  std::vector<double> residual_curve;
};

/// Dykstra alternating projections between the affine constraint set and the
/// PSD cone, followed by a Levenberg-Marquardt polish of a Gram factor. If that
/// leaves the residual above tol, an interior-point solve reseeds the polish.
FeasibilityResult solve_feasibility(const ConstraintMap& map, const FeasibilityOptions& opts = {});

struct CertificateCheck {
  bool passed = true;
  double max_identity_residual = 0.0;  // || I - p0* p0 - u* (I - delta* delta) u ||
  double max_p0_norm = 0.0;
  int samples = 0;
  std::vector<double> per_sample;
};

/// Checks I - p0(x)* p0(x) = u(x)* [I - delta(x)* delta(x)] u(x) at every sample.
/// Samples must lie in V_Lambda and in G_delta (DomainError otherwise).
CertificateCheck verify_certificate(const GramCertificate& cert, const AlgebraBasis& basis, const PolyMatrix& delta,
                                    const FreePoly& p0, const std::vector<MatrixTuple>& samples,
                                    double identity_tol = 1e-7, double variety_tol = 1e-8);

struct TelescopingCheck {
  double tail_norm = 0.0;       // || F* (delta^m)* delta^m F ||, F = e_1 (x) p0(Lambda)
  double bound = 0.0;           // ||delta(Lambda)||^{2m} ||p0(Lambda)||^2
  double identity_residual = 0.0;  // F*F - sum_{k<m} F* delta^k* (I - delta* delta) delta^k F - tail
};

TelescopingCheck telescoping_tail(const PolyMatrix& delta, const MatrixTuple& lambda, const CMatrix& p0_value,
                                  int m);

}  // namespace freepick
