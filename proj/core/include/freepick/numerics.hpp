#pragma once

#include <complex>

#include <Eigen/Dense>

#include "freepick/errors.hpp"

namespace freepick {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Every numerical threshold used across the library, in one place.
struct Tolerances {
  double coefficient_drop = 1e-14;  // FreePoly terms below this are dropped
  double hermitian = 1e-10;         // relative ||A - A*|| admitted by herm_eig
  double lstsq_cutoff = 1e-12;      // relative singular value cutoff in lstsq
  double rank = 1e-10;              // relative rank threshold (algebra, subspaces)
  double membership = 1e-8;         // W in M_Lambda residual
  double variety = 1e-8;            // relation residual for x in V_Lambda
  double sdp = 1e-9;                // affine residual accepted by the Gram solver
  int max_iter = 50000;             // alternating projection budget
  double gram_match = 1e-8;         // ||P*P - Q*Q|| admitted by unitary_completion
};

const Tolerances& default_tolerances();

/// Largest singular value.  Throws NumericsError on NaN/Inf entries.
double op_norm(const CMatrix& a);

void require_finite(const CMatrix& a, const char* what);

struct HermEig {
  RVector values;  // ascending
  CMatrix vectors;  // unitary, columns are eigenvectors
};

/// Eigen-decomposition of a Hermitian matrix.  The input is symmetrized first;
/// an asymmetry above tol.hermitian * ||A|| is rejected.
HermEig herm_eig(const CMatrix& a, const Tolerances& tol = default_tolerances());

/// Nearest positive semidefinite matrix in the Frobenius norm.
CMatrix psd_project(const CMatrix& a, const Tolerances& tol = default_tolerances());

struct LstsqResult {
  CVector x;
  double residual = 0.0;
};

/// Minimum-norm least squares through the SVD.
LstsqResult lstsq(const CMatrix& a, const CVector& b,
                  const Tolerances& tol = default_tolerances());

/// Numerical rank with a threshold relative to the largest singular value.
Eigen::Index numerical_rank(const CMatrix& a, double relative_threshold);

/// Orthonormal basis of the column space (SVD, relative threshold).
CMatrix range_basis(const CMatrix& a, double relative_threshold);

/// Orthonormal basis of the orthogonal complement of span(columns of q),
/// where q already has orthonormal columns.  The basis is deterministic:
/// standard basis vectors are projected and orthonormalized in index order,
/// and each vector's first nonzero component is made real positive.
CMatrix complement_basis(const CMatrix& q);

/// Unitary V with V p = q, given p*p = q*q up to tol.gram_match.
/// The range of p is mapped onto the range of q through the SVD of p and the
/// orthogonal complements are matched by complement_basis.
/// Throws NumericsError on Gram mismatch or rank disagreement.
CMatrix unitary_completion(const CMatrix& p, const CMatrix& q,
                           const Tolerances& tol = default_tolerances());

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Block diagonal a (+) b.
CMatrix block_diag(const CMatrix& a, const CMatrix& b);

/// ||a*a - 1|| in the operator norm.
double isometry_defect(const CMatrix& a);

}  // namespace freepick
