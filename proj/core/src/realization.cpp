#include "freepick/realization.hpp"

namespace freepick {

CMatrix Realization::colligation() const {
  const int s = state_dim();
  CMatrix v(io_dim + s, io_dim + s);
  v.topLeftCorner(io_dim, io_dim) = A;
  v.topRightCorner(io_dim, s) = B;
  v.bottomLeftCorner(s, io_dim) = C;
  v.bottomRightCorner(s, s) = D;
  return v;
}

Realization split_colligation(const PolyMatrix& delta, const CMatrix& v, int io_dim) {
  if (!delta.square()) throw DimensionError("realization: delta must be square");
  if (v.rows() != v.cols()) throw DimensionError("realization: colligation must be square");
  const auto s = v.rows() - io_dim;
  if (io_dim < 1 || s < 0 || s % delta.rows() != 0) {
    throw DimensionError("realization: state size is not a multiple of J");
  }
  Realization r;
  r.delta = delta;
  r.io_dim = io_dim;
  r.L_dim = static_cast<int>(s / delta.rows());
  r.A = v.topLeftCorner(io_dim, io_dim);
  r.B = v.topRightCorner(io_dim, s);
  r.C = v.bottomLeftCorner(s, io_dim);
  r.D = v.bottomRightCorner(s, s);
  return r;
}

LurkingVectors lurking_vectors(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                               const GramCertificate& cert) {
  const int n = basis.n();
  const int J = delta.rows();
  if (cert.J != J || cert.K != basis.dim() || cert.n != n) {
    throw DimensionError("lurking_vectors: certificate does not match the problem");
  }
  const auto L = static_cast<int>(cert.factor.rows());
  const CMatrix dl = eval_matrix(delta, basis.point);
  const std::vector<CMatrix> us = cert.u_values(basis.basis_mats, n);

  LurkingVectors lv{CMatrix::Zero(1 + J * L, n * n), CMatrix::Zero(1 + J * L, n * n)};
  for (int k = 0; k < n; ++k) {
    for (int m = 0; m < n; ++m) {
      const int col = k * n + m;
      lv.p(0, col) = k == m ? 1.0 : 0.0;
      lv.q(0, col) = w(k, m);
    }
  }
  for (int i = 0; i < L; ++i) {
    const CMatrix& u = us[static_cast<std::size_t>(i)];
    const CMatrix du = dl * u;
    for (int j = 0; j < J; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int m = 0; m < n; ++m) {
          lv.p(1 + i * J + j, k * n + m) = du(j * n + k, m);
          lv.q(1 + i * J + j, k * n + m) = u(j * n + k, m);
        }
      }
    }
  }
  return lv;
}

Realization lurking_isometry(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                             const GramCertificate& cert, const Tolerances& tol) {
  const LurkingVectors lv = lurking_vectors(basis, delta, w, cert);
  return split_colligation(delta, unitary_completion(lv.p, lv.q, tol), 1);
}

CMatrix eval_transfer(const Realization& r, const MatrixTuple& x) {
  if (x.dims() != r.delta.dims()) throw DimensionError("eval_transfer: variable counts differ");
  const int m = x.size();
  const CMatrix dx = eval_matrix(r.delta, x);
  const double dn = op_norm(dx);
  if (!(dn < 1.0)) {
    throw DomainError("eval_transfer: point outside G_delta (||delta(x)|| = " + std::to_string(dn) + ")");
  }
  const CMatrix im = CMatrix::Identity(m, m);
  CMatrix out = kron(r.A, im);
  if (r.L_dim == 0) return out;

  const CMatrix big_delta = kron(CMatrix::Identity(r.L_dim, r.L_dim), dx);
  const CMatrix resolvent = CMatrix::Identity(big_delta.rows(), big_delta.cols()) - kron(r.D, im) * big_delta;
  Eigen::PartialPivLU<CMatrix> lu(resolvent);
  if (!(lu.rcond() > 1e-14)) throw NumericsError("eval_transfer: singular resolvent");
  out += kron(r.B, im) * (big_delta * lu.solve(kron(r.C, im)));
  return out;
}

CMatrix derivative(const Realization& r, const MatrixTuple& lambda, const MatrixTuple& h) {
  if (r.io_dim != 1) throw DimensionError("derivative: scalar-valued realizations only");
  const int n = lambda.size();
  const CMatrix value = eval_transfer(r, jordan_fold(lambda, h));
  return value.block(0, n, n, n);
}

}  // namespace freepick
