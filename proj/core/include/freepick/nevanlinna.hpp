#pragma once

#include <functional>

#include "freepick/realization.hpp"

namespace freepick {

/// Subspace data of the Nevanlinna parametrization on the ambient space
/// L1 = C (+) C^J (x) C^L, coordinate 0 first, then the state coordinates.
///
/// N2 = span p_{k,v}, N1 = span q_{k,v}, M2 and M1 their complements.  The
/// unitary u acts from (C (+) M1) (+) state to (C (+) M2) (+) state by
///   m1 (+) a  ->  E2* a  together with  m1 + V P_N2 a,
/// and g is u read as a colligation with io space C (+) M.
struct NevanlinnaData {
  int ambient = 0;
  int mu = 0;  // dim M1 = dim M2
  CMatrix n1, n2;  // orthonormal bases, ambient x rank
  CMatrix e1, e2;  // orthonormal bases of M1, M2
  CMatrix v;       // the lurking isometry colligation
  CMatrix u;       // (ambient + mu) square
  Realization g;
  /// E1* V E2: the parameter that reproduces v's own transfer function.
  CMatrix theta_colligation;
};

NevanlinnaData build_parametrization(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                                     const GramCertificate& cert, const Tolerances& tol = default_tolerances());

/// Theta(x) as a (mu m) x (mu m) matrix mapping M2 (x) C^m into M1 (x) C^m.
using ThetaEvaluator = std::function<CMatrix(const MatrixTuple&)>;

ThetaEvaluator constant_theta(const CMatrix& theta0);
ThetaEvaluator realization_theta(const Realization& r);

/// G11 + G12 Theta (1 - G22 Theta)^{-1} G21 at x.
CMatrix lft(const NevanlinnaData& data, const ThetaEvaluator& theta, const MatrixTuple& x);

}  // namespace freepick
