#pragma once

#include "freepick/certificate.hpp"

namespace freepick {

/// A unitary colligation V = [[A, B], [C, D]] on C^p (+) (C^J (x) C^L) with its
/// transfer function
///   phi(x) = A (x) 1 + (B (x) 1) Delta (1 - (D (x) 1) Delta)^{-1} (C (x) 1),
/// Delta = 1_L (x) delta(x).  State coordinates are ordered (i, j, r) ->
/// (i J + j) m + r for multiplicity i, slot j and row r of an m x m point.
struct Realization {
  PolyMatrix delta;
  int io_dim = 1;
  int L_dim = 0;
  CMatrix A;  // io_dim x io_dim
  CMatrix B;  // io_dim x J L
  CMatrix C;  // J L x io_dim
  CMatrix D;  // J L x J L

  int J() const noexcept { return delta.rows(); }
  int state_dim() const noexcept { return J() * L_dim; }
  CMatrix colligation() const;
};

/// Assemble a realization from a square colligation matrix.
Realization split_colligation(const PolyMatrix& delta, const CMatrix& v, int io_dim);

/// The paired vectors of the lurking isometry.  Column k n + m of p is
/// [delta_km ; (delta(Lambda) u(Lambda))[., k, m]], of q is [W(k, m) ; u(Lambda)[., k, m]].
struct LurkingVectors {
  CMatrix p;  // (1 + J N0) x n^2
  CMatrix q;
};

LurkingVectors lurking_vectors(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                               const GramCertificate& cert);

/// Unitary completion of the map p_{k,v} -> q_{k,v}, split into a realization.
Realization lurking_isometry(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                             const GramCertificate& cert, const Tolerances& tol = default_tolerances());

/// phi(x) for x in G_delta.  Returns an (io_dim m) x (io_dim m) matrix.
CMatrix eval_transfer(const Realization& r, const MatrixTuple& x);

/// D phi(lambda)[h]: the (1,2) block of phi at [[lambda, h], [0, lambda]].
CMatrix derivative(const Realization& r, const MatrixTuple& lambda, const MatrixTuple& h);

}  // namespace freepick
