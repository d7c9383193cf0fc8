#include "freepick/nevanlinna.hpp"

namespace freepick {

NevanlinnaData build_parametrization(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                                     const GramCertificate& cert, const Tolerances& tol) {
  const LurkingVectors lv = lurking_vectors(basis, delta, w, cert);
  NevanlinnaData nd;
  nd.ambient = static_cast<int>(lv.p.rows());
  nd.v = unitary_completion(lv.p, lv.q, tol);
  nd.n2 = range_basis(lv.p, tol.rank);
  nd.n1 = range_basis(lv.q, tol.rank);
  if (nd.n1.cols() != nd.n2.cols()) throw NumericsError("build_parametrization: rank(P) != rank(Q)");
  nd.e2 = complement_basis(nd.n2);
  nd.e1 = complement_basis(nd.n1);
  nd.mu = static_cast<int>(nd.e1.cols());

  const int a = nd.ambient;
  const int mu = nd.mu;
  const int s = a - 1;
  const CMatrix z = nd.v * (nd.n2 * nd.n2.adjoint());
  const CMatrix e2a = nd.e2.adjoint();

  // Input order [C, M1, state], output order [C, M2, state].
  CMatrix u = CMatrix::Zero(a + mu, a + mu);
  u(0, 0) = z(0, 0);
  u.block(0, 1, 1, mu) = nd.e1.topRows(1);
  u.block(0, 1 + mu, 1, s) = z.block(0, 1, 1, s);
  u.block(1, 0, mu, 1) = e2a.col(0);
  u.block(1, 1 + mu, mu, s) = e2a.rightCols(s);
  u.block(1 + mu, 0, s, 1) = z.block(1, 0, s, 1);
  u.block(1 + mu, 1, s, mu) = nd.e1.bottomRows(s);
  u.block(1 + mu, 1 + mu, s, s) = z.bottomRightCorner(s, s);
  nd.u = u;
  nd.g = split_colligation(delta, u, 1 + mu);
  nd.theta_colligation = nd.e1.adjoint() * nd.v * nd.e2;
  return nd;
}

ThetaEvaluator constant_theta(const CMatrix& theta0) {
  return [theta0](const MatrixTuple& x) {
    return kron(theta0, CMatrix::Identity(x.size(), x.size()));
  };
}

ThetaEvaluator realization_theta(const Realization& r) {
  return [r](const MatrixTuple& x) { return eval_transfer(r, x); };
}

CMatrix lft(const NevanlinnaData& data, const ThetaEvaluator& theta, const MatrixTuple& x) {
  const CMatrix gx = eval_transfer(data.g, x);
  const int m = x.size();
  const int mu = data.mu;
  const CMatrix g11 = gx.topLeftCorner(m, m);
  if (mu == 0) return g11;

  const CMatrix th = theta(x);
  if (th.rows() != mu * m || th.cols() != mu * m) {
    throw DimensionError("lft: Theta(x) must be " + std::to_string(mu * m) + " square");
  }
  require_finite(th, "lft");
  const double tn = op_norm(th);
  if (tn > 1.0 + 1e-12) throw DomainError("lft: ||Theta(x)|| = " + std::to_string(tn) + " exceeds 1");

  const CMatrix g12 = gx.topRightCorner(m, mu * m);
  const CMatrix g21 = gx.bottomLeftCorner(mu * m, m);
  const CMatrix g22 = gx.bottomRightCorner(mu * m, mu * m);
  const CMatrix feedback = CMatrix::Identity(mu * m, mu * m) - g22 * th;
  Eigen::PartialPivLU<CMatrix> lu(feedback);
  if (!(lu.rcond() > 1e-13)) throw NumericsError("lft: 1 - G22 Theta is singular");
  return g11 + g12 * th * lu.solve(g21);
}

}  // namespace freepick
