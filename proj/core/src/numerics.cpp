#include "freepick/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace freepick {

const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

void require_finite(const CMatrix& a, const char* what) {
  if (!a.allFinite()) {
    throw NumericsError(std::string(what) + ": non-finite matrix entry");
  }
}

double op_norm(const CMatrix& a) {
  require_finite(a, "op_norm");
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

HermEig herm_eig(const CMatrix& a, const Tolerances& tol) {
  require_finite(a, "herm_eig");
  if (a.rows() != a.cols()) throw DimensionError("herm_eig: matrix is not square");
  const double scale = std::max(a.norm(), 1e-300);
  if ((a - a.adjoint()).norm() > tol.hermitian * scale) {
    throw NumericsError("herm_eig: matrix is not Hermitian within tolerance");
  }
  CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  if (es.info() != Eigen::Success) throw NumericsError("herm_eig: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

CMatrix psd_project(const CMatrix& a, const Tolerances& tol) {
  HermEig eig = herm_eig(a, tol);
  RVector clipped = eig.values.cwiseMax(0.0);
  CMatrix out = eig.vectors * clipped.cast<Complex>().asDiagonal() * eig.vectors.adjoint();
  return 0.5 * (out + out.adjoint());
}

LstsqResult lstsq(const CMatrix& a, const CVector& b, const Tolerances& tol) {
  require_finite(a, "lstsq");
  if (!b.allFinite()) throw NumericsError("lstsq: non-finite right-hand side");
  if (a.rows() != b.size()) throw DimensionError("lstsq: row count mismatch");
  LstsqResult out;
  if (a.cols() == 0) {
    out.x = CVector::Zero(0);
    out.residual = b.norm();
    return out;
  }
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = s.size() > 0 ? tol.lstsq_cutoff * s(0) : 0.0;
  CVector utb = svd.matrixU().adjoint() * b;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    utb(i) = (s(i) > cut && s(i) > 0.0) ? utb(i) / s(i) : Complex(0.0);
  }
  out.x = svd.matrixV() * utb;
  out.residual = (a * out.x - b).norm();
  return out;
}

Eigen::Index numerical_rank(const CMatrix& a, double relative_threshold) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<CMatrix> svd(a);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > relative_threshold * s(0)) ++r;
  return r;
}

CMatrix range_basis(const CMatrix& a, double relative_threshold) {
  if (a.size() == 0) return CMatrix(a.rows(), 0);
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s(0) > 0.0) {
    while (r < s.size() && s(r) > relative_threshold * s(0)) ++r;
  }
  return svd.matrixU().leftCols(r);
}

namespace {

void fix_phases(CMatrix& basis) {
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    for (Eigen::Index r = 0; r < basis.rows(); ++r) {
      const double mag = std::abs(basis(r, c));
      if (mag > 1e-12) {
        basis.col(c) *= std::conj(basis(r, c)) / mag;
        break;
      }
    }
  }
}

}  // namespace

CMatrix complement_basis(const CMatrix& q) {
  const Eigen::Index m = q.rows();
  const Eigen::Index r = q.cols();
  if (r == 0) return CMatrix::Identity(m, m);
  if (r >= m) return CMatrix(m, 0);
  // Full left singular basis of q: the trailing m - r columns span the complement.
  Eigen::JacobiSVD<CMatrix> svd(q, Eigen::ComputeFullU);
  CMatrix comp = svd.matrixU().rightCols(m - r);
  // Remove any leakage from q, then re-orthonormalize.
  comp -= q * (q.adjoint() * comp);
  Eigen::HouseholderQR<CMatrix> qr(comp);
  CMatrix basis = qr.householderQ() * CMatrix::Identity(m, m - r);
  fix_phases(basis);
  return basis;
}

CMatrix unitary_completion(const CMatrix& p, const CMatrix& q, const Tolerances& tol) {
  require_finite(p, "unitary_completion");
  require_finite(q, "unitary_completion");
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw DimensionError("unitary_completion: P and Q have different shapes");
  }
  const Eigen::Index m = p.rows();
  const double pnorm = op_norm(p);
  const double gram_gap = op_norm(p.adjoint() * p - q.adjoint() * q);
  if (gram_gap > tol.gram_match * std::max(1.0, pnorm * pnorm)) {
    throw NumericsError("unitary_completion: Gram matrices differ by " + std::to_string(gram_gap));
  }
  if (p.cols() == 0 || pnorm == 0.0) return CMatrix::Identity(m, m);

  Eigen::JacobiSVD<CMatrix> svd(p, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol.rank * s(0)) ++r;
  const Eigen::Index rq = numerical_rank(q, tol.rank);
  if (rq != r) {
    throw NumericsError("unitary_completion: rank(P)=" + std::to_string(r) +
                        " differs from rank(Q)=" + std::to_string(rq));
  }

  CMatrix up = svd.matrixU().leftCols(r);
  RVector inv_s = s.head(r).cwiseInverse();
  CMatrix y = q * svd.matrixV().leftCols(r) * inv_s.cast<Complex>().asDiagonal();
  // Polar factor of y: the closest matrix with orthonormal columns.
  Eigen::JacobiSVD<CMatrix> ysvd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  y = ysvd.matrixU() * ysvd.matrixV().adjoint();

  CMatrix cp = complement_basis(up);
  CMatrix cq = complement_basis(y);
  return y * up.adjoint() + cq * cp.adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix block_diag(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

double isometry_defect(const CMatrix& a) {
  return op_norm(a.adjoint() * a - CMatrix::Identity(a.cols(), a.cols()));
}

}  // namespace freepick
