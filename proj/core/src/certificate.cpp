#include "freepick/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace freepick {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

// Position of the (i, j), i < j, pair in HermitianCoords.
int pair_offset(int dim, int i, int j) {
  // pairs before row i: sum_{r<i} (dim - 1 - r)
  const int before = i * (dim - 1) - i * (i - 1) / 2;
  return dim + 2 * (before + (j - i - 1));
}

}  // namespace

RVector HermitianCoords::to_vec(const CMatrix& h) const {
  RVector v(size());
  for (int i = 0; i < dim_; ++i) v(i) = h(i, i).real();
  int idx = dim_;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      v(idx++) = kSqrt2 * h(i, j).real();
      v(idx++) = kSqrt2 * h(i, j).imag();
    }
  }
  return v;
}

CMatrix HermitianCoords::from_vec(const RVector& v) const {
  CMatrix h(dim_, dim_);
  for (int i = 0; i < dim_; ++i) h(i, i) = v(i);
  int idx = dim_;
  for (int i = 0; i < dim_; ++i) {
    for (int j = i + 1; j < dim_; ++j) {
      const Complex z(v(idx) / kSqrt2, v(idx + 1) / kSqrt2);
      idx += 2;
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

// ---------------------------------------------------------------- ConstraintMap

namespace {

// Rows (alpha, j) of the stacked n^2-indexed views of F and G.
struct StackedViews {
  CMatrix y;  // (N0 J) x n^2, y[alpha J + j, k n + m] = F_alpha[j n + k, m]
  CMatrix x;  // same for G_alpha
};

StackedViews stack_views(const std::vector<CMatrix>& f, const std::vector<CMatrix>& g, int n, int J) {
  const int n0 = static_cast<int>(f.size());
  StackedViews s{CMatrix::Zero(n0 * J, n * n), CMatrix::Zero(n0 * J, n * n)};
  for (int a = 0; a < n0; ++a) {
    for (int j = 0; j < J; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int m = 0; m < n; ++m) {
          s.y(a * J + j, k * n + m) = f[static_cast<std::size_t>(a)](j * n + k, m);
          s.x(a * J + j, k * n + m) = g[static_cast<std::size_t>(a)](j * n + k, m);
        }
      }
    }
  }
  return s;
}

}  // namespace

CMatrix ConstraintMap::apply(const CMatrix& q) const {
  const StackedViews s = stack_views(f_values, g_values, n, J);
  const CMatrix qj = kron(q, CMatrix::Identity(J, J));
  return s.y.adjoint() * qj * s.y - s.x.adjoint() * qj * s.x;
}

double ConstraintMap::residual(const CMatrix& q) const {
  HermitianCoords hq(N0);
  return (map * hq.to_vec(q) - target).norm();
}

RVector ConstraintMap::project_affine(const RVector& x) const {
  return x - range_v * (range_v.transpose() * x) + least_norm;
}

ConstraintMap build_constraint_map(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                                   const Tolerances& tol) {
  if (!delta.square()) throw DimensionError("build_constraint_map: delta must be square");
  if (delta.dims() != basis.d()) throw DimensionError("build_constraint_map: delta and Lambda differ in d");
  const int n = basis.n();
  if (w.rows() != n || w.cols() != n) throw DimensionError("build_constraint_map: W has the wrong size");
  const CMatrix dl = eval_matrix(delta, basis.point);
  const double dnorm = op_norm(dl);
  if (!(dnorm < 1.0)) {
    throw DomainError("build_constraint_map: Lambda is not in G_delta (||delta(Lambda)|| = " +
                      std::to_string(dnorm) + ")");
  }

  ConstraintMap cm;
  cm.n = n;
  cm.d = basis.d();
  cm.J = delta.rows();
  cm.K = basis.dim();
  cm.N0 = cm.J * cm.K;
  cm.w = w;
  cm.basis_polys = basis.word_expansions;
  for (int j = 0; j < cm.J; ++j) {
    for (int k = 0; k < cm.K; ++k) {
      CMatrix f = CMatrix::Zero(cm.J * n, n);
      f.block(j * n, 0, n, n) = basis.basis_mats[static_cast<std::size_t>(k)];
      cm.g_values.push_back(dl * f);
      cm.f_values.push_back(std::move(f));
    }
  }

  const int nn = n * n;
  HermitianCoords out_coords(nn);
  HermitianCoords in_coords(cm.N0);
  const StackedViews s = stack_views(cm.f_values, cm.g_values, n, cm.J);
  auto block_y = [&](int a) { return s.y.middleRows(a * cm.J, cm.J); };
  auto block_x = [&](int a) { return s.x.middleRows(a * cm.J, cm.J); };

  cm.map.resize(out_coords.size(), in_coords.size());
  for (int a = 0; a < cm.N0; ++a) {
    CMatrix l = block_y(a).adjoint() * block_y(a) - block_x(a).adjoint() * block_x(a);
    cm.map.col(a) = out_coords.to_vec(l);
  }
  const Complex iu(0.0, 1.0);
  for (int a = 0; a < cm.N0; ++a) {
    for (int b = a + 1; b < cm.N0; ++b) {
      CMatrix ab = block_y(a).adjoint() * block_y(b) - block_x(a).adjoint() * block_x(b);
      CMatrix ba = ab.adjoint();
      const int col = pair_offset(cm.N0, a, b);
      cm.map.col(col) = out_coords.to_vec((ab + ba) / kSqrt2);
      cm.map.col(col + 1) = out_coords.to_vec((iu * ab - iu * ba) / kSqrt2);
    }
  }

  CVector eps = CVector::Zero(nn);
  CVector omega(nn);
  for (int k = 0; k < n; ++k) {
    eps(k * n + k) = 1.0;
    for (int m = 0; m < n; ++m) omega(k * n + m) = w(k, m);
  }
  const CMatrix t = eps * eps.transpose() - omega.conjugate() * omega.transpose();
  cm.target = out_coords.to_vec(t);

  Eigen::BDCSVD<RMatrix> svd(cm.map, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  Eigen::Index r = 0;
  if (sv.size() > 0 && sv(0) > 0.0) {
    while (r < sv.size() && sv(r) > tol.lstsq_cutoff * sv(0)) ++r;
  }
  cm.range_v = svd.matrixV().leftCols(r);
  RVector coeff = svd.matrixU().leftCols(r).transpose() * cm.target;
  coeff.array() /= sv.head(r).array();
  cm.least_norm = cm.range_v * coeff;
  return cm;
}

// ---------------------------------------------------------------- solver

namespace {

CMatrix factor_psd(const CMatrix& q) {
  Tolerances loose;
  loose.hermitian = 1e-6;
  HermEig eig = herm_eig(q, loose);
  RVector s = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * s.cast<Complex>().asDiagonal();  // R with R R* = Q
}

class GramPolisher {
 public:
  explicit GramPolisher(const ConstraintMap& cm) : cm_(cm), coords_(cm.N0) {}

  RVector residual(const CMatrix& r) const {
    return cm_.map * coords_.to_vec(r * r.adjoint()) - cm_.target;
  }

  // Jacobian of residual with respect to (Re R, Im R), column-major in R.
  RMatrix jacobian(const CMatrix& r) const {
    const int n0 = cm_.N0;
    const int sz = n0 * static_cast<int>(r.cols());
    RMatrix jac(cm_.map.rows(), 2 * sz);
    const Complex iu(0.0, 1.0);
    for (int b = 0; b < r.cols(); ++b) {
      const CVector rb = r.col(b);
      for (int a = 0; a < n0; ++a) {
        jac.col(b * n0 + a) = directional(a, rb);
        jac.col(sz + b * n0 + a) = directional(a, -iu * rb);
      }
    }
    return jac;
  }

 private:
  // map * coords(e_a v* + v e_a*), using the sparsity of the perturbation.
  RVector directional(int a, const CVector& v) const {
    const int n0 = cm_.N0;
    RVector out = cm_.map.col(a) * (2.0 * v(a).real());
    for (int j = a + 1; j < n0; ++j) {
      const int c = pair_offset(n0, a, j);
      out += cm_.map.col(c) * (kSqrt2 * v(j).real()) + cm_.map.col(c + 1) * (-kSqrt2 * v(j).imag());
    }
    for (int i = 0; i < a; ++i) {
      const int c = pair_offset(n0, i, a);
      out += cm_.map.col(c) * (kSqrt2 * v(i).real()) + cm_.map.col(c + 1) * (kSqrt2 * v(i).imag());
    }
    return out;
  }

  const ConstraintMap& cm_;
  HermitianCoords coords_;
};

// Levenberg-Marquardt on R (Q = R R*, R possibly rectangular), minimum-norm damped steps.
CMatrix polish_factor(const ConstraintMap& cm, CMatrix r, int max_iter, double stop_at, double* final_residual) {
  GramPolisher pol(cm);
  const int n0 = cm.N0;
  const int sz = n0 * static_cast<int>(r.cols());
  RVector res = pol.residual(r);
  double cost = res.norm();
  double mu = -1.0;
  const auto apply_step = [&](const RVector& step) {
    CMatrix trial = r;
    for (int b = 0; b < r.cols(); ++b) {
      for (int a = 0; a < n0; ++a) trial(a, b) += Complex(step(b * n0 + a), step(sz + b * n0 + a));
    }
    return trial;
  };
  for (int it = 0; it < max_iter && cost > stop_at; ++it) {
    const RMatrix jac = pol.jacobian(r);
    // Full Gauss-Newton step first; it converges quadratically near a solution.
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(jac);
    cod.setThreshold(1e-12);
    CMatrix trial = apply_step(-cod.solve(res));
    RVector tres = pol.residual(trial);
    double tcost = tres.norm();
    if (std::isfinite(tcost) && tcost < 0.5 * cost) {
      r = std::move(trial);
      res = tres;
      cost = tcost;
      continue;
    }
    const RMatrix jjt = jac * jac.transpose();
    if (mu < 0.0) mu = 1e-6 * std::max(jjt.diagonal().maxCoeff(), 1e-12);
    bool improved = false;
    while (mu < 1e12) {
      RMatrix damped = jjt;
      damped.diagonal().array() += mu;
      Eigen::LDLT<RMatrix> ldlt(damped);
      trial = apply_step(-(jac.transpose() * ldlt.solve(res)));
      tres = pol.residual(trial);
      tcost = tres.norm();
      if (std::isfinite(tcost) && tcost < cost) {
        r = std::move(trial);
        res = tres;
        const double gain = cost - tcost;
        cost = tcost;
        mu = std::max(mu / 5.0, 1e-18);
        improved = gain > 1e-16 * std::max(1.0, cost) || cost <= stop_at;
        break;
      }
      mu *= 4.0;
    }
    if (!improved) break;
  }
  *final_residual = cost;
  return r;
}


CMatrix herm(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

// Largest t in (0, 1] with X + t D positive definite, shortened by `frac`.
double cone_step(const CMatrix& x, const CMatrix& dir, double frac) {
  Eigen::LLT<CMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const CMatrix l_inv = llt.matrixL().solve(CMatrix::Identity(x.rows(), x.cols()));
  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(herm(l_inv * dir * l_inv.adjoint()), Eigen::EigenvaluesOnly)
                         .eigenvalues();
  const double lo = ev.minCoeff();
  if (lo >= 0.0) return 1.0;
  return std::min(1.0, frac * (-1.0 / lo));
}

struct SdpSolution {
  CMatrix x;
  RVector y;
  CMatrix z;
};

// Primal-dual interior point (HKM direction, Mehrotra predictor-corrector) for
// min <C, X> s.t. Re tr(A_i X) = b_i, X >= 0, and its dual
// max b'y s.t. Z = C - sum y_i A_i >= 0.
SdpSolution interior_point(const std::vector<CMatrix>& a, const RVector& b, const CMatrix& c, int max_iter) {
  const auto dim = static_cast<int>(c.rows());
  const auto m = static_cast<int>(a.size());
  const auto op = [&](const CMatrix& h) {
    RVector out(m);
    for (int i = 0; i < m; ++i) out(i) = a[static_cast<std::size_t>(i)].cwiseProduct(h.transpose()).sum().real();
    return out;
  };
  const auto adj = [&](const RVector& y) {
    CMatrix out = CMatrix::Zero(dim, dim);
    for (int i = 0; i < m; ++i) out += y(i) * a[static_cast<std::size_t>(i)];
    return out;
  };
  const CMatrix id = CMatrix::Identity(dim, dim);
  const double scale_b = 1.0 + b.norm();
  const double scale_c = 1.0 + c.norm();

  SdpSolution s{id, RVector::Zero(m), id};
  CMatrix& x = s.x;
  CMatrix& z = s.z;
  RVector& y = s.y;
  for (int it = 0; it < max_iter; ++it) {
    const RVector rp = b - op(x);
    const CMatrix rd = c - adj(y) - z;
    const double mu = (x * z).trace().real() / dim;
    if (rp.norm() <= 1e-12 * scale_b && rd.norm() <= 1e-12 * scale_c && mu <= 1e-13) break;
    const CMatrix zi = herm(z.inverse());
    std::vector<CMatrix> xaz(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) xaz[static_cast<std::size_t>(j)] = x * a[static_cast<std::size_t>(j)] * zi;
    RMatrix schur(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        schur(i, j) =
            a[static_cast<std::size_t>(i)].cwiseProduct(xaz[static_cast<std::size_t>(j)].transpose()).sum().real();
      }
    }
    schur = 0.5 * (schur + schur.transpose());
    const Eigen::LDLT<RMatrix> solver(schur);
    const auto direction = [&](const CMatrix& g, RVector* dy, CMatrix* dx, CMatrix* dz) {
      *dy = solver.solve(rp - op(herm(g)));
      *dz = rd - adj(*dy);
      *dx = herm(g + x * adj(*dy) * zi);
    };
    RVector dy;
    CMatrix dx;
    CMatrix dz;
    const CMatrix base = -x - x * rd * zi;
    direction(base, &dy, &dx, &dz);
    const double ap = cone_step(x, dx, 1.0);
    const double ad = cone_step(z, dz, 1.0);
    const double mu_aff = ((x + ap * dx) * (z + ad * dz)).trace().real() / dim;
    const double sigma = std::pow(std::clamp(mu_aff / std::max(mu, 1e-300), 0.0, 1.0), 3.0);
    direction(base + (sigma * mu * id - dx * dz) * zi, &dy, &dx, &dz);
    if (!dx.allFinite() || !dz.allFinite() || !dy.allFinite()) break;
    const double tp = cone_step(x, dx, 0.95);
    const double td = cone_step(z, dz, 0.95);
    if (tp < 1e-12 && td < 1e-12) break;
    x = herm(x + tp * dx);
    z = herm(z + td * dz);
    y += td * dy;
  }
  return s;
}

// Most interior point of {Q >= 0 : map Q = target, tr Q <= trace_cap}: maximize
// lambda with Q - lambda I >= 0 over the affine set parametrized by the kernel
// of the map. Unlike the feasibility problem itself this has strictly feasible
// points on both sides, and the maximizer keeps Q well away from low rank,
// which is where the factor polish converges fastest.
CMatrix central_gram(const ConstraintMap& cm, double trace_cap, int max_iter) {
  const int n0 = cm.N0;
  const HermitianCoords hq(n0);
  Eigen::JacobiSVD<RMatrix> svd(cm.map, Eigen::ComputeFullV);
  const auto rank = static_cast<int>(cm.range_v.cols());
  const RMatrix kernel = svd.matrixV().rightCols(svd.matrixV().cols() - rank);
  const CMatrix qp = hq.from_vec(cm.least_norm);
  const int dim = n0 + 1;

  std::vector<CMatrix> a;
  a.reserve(static_cast<std::size_t>(kernel.cols()) + 1);
  for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
    const CMatrix kk = hq.from_vec(kernel.col(k));
    CMatrix ak = CMatrix::Zero(dim, dim);
    ak.topLeftCorner(n0, n0) = -kk;
    ak(n0, n0) = kk.trace();
    a.push_back(std::move(ak));
  }
  CMatrix a_lambda = CMatrix::Zero(dim, dim);
  a_lambda.topLeftCorner(n0, n0).setIdentity();
  a.push_back(a_lambda);
  RVector b = RVector::Zero(static_cast<Eigen::Index>(a.size()));
  b(b.size() - 1) = 1.0;
  CMatrix c = CMatrix::Zero(dim, dim);
  c.topLeftCorner(n0, n0) = qp;
  c(n0, n0) = trace_cap - qp.trace().real();

  const SdpSolution sol = interior_point(a, b, c, max_iter);
  return herm(qp + hq.from_vec(kernel * sol.y.head(kernel.cols())));
}

// Polishes a Gram matrix through several factor shapes and keeps the best.
// Solutions often sit on a thin face of the cone, so factors truncated to the
// numerical rank are tried along with a lifted full-rank one; zero columns of a
// factor have zero Jacobian, which stalls the full-rank run on such faces.
CMatrix polish_gram(const ConstraintMap& cm, const CMatrix& q, const FeasibilityOptions& opts, double* best_res) {
  Tolerances loose;
  loose.hermitian = 1e-6;
  const HermEig eig = herm_eig(q, loose);
  const double top = std::max(eig.values.maxCoeff(), 0.0);
  const double lift = 1e-6 * std::max(1.0, top);
  const CMatrix id = CMatrix::Identity(cm.N0, cm.N0);
  std::vector<CMatrix> starts{factor_psd(q), factor_psd(q + lift * id), factor_psd(q + 1e3 * lift * id)};
  int last_rank = cm.N0;
  for (double cut : {1e-6, 1e-5, 1e-4, 1e-3, 1e-2}) {
    const int rank = static_cast<int>((eig.values.array() > cut * top).count());
    if (rank == 0 || rank == last_rank) continue;
    last_rank = rank;
    starts.push_back(eig.vectors.rightCols(rank) * eig.values.tail(rank).cwiseSqrt().cast<Complex>().asDiagonal());
  }
  CMatrix best;
  *best_res = std::numeric_limits<double>::infinity();
  for (const CMatrix& start : starts) {
    double res = 0.0;
    CMatrix r = polish_factor(cm, start, opts.polish_iter, std::min(opts.tol * 1e-4, 1e-13), &res);
    if (res < *best_res) {
      best = std::move(r);
      *best_res = res;
    }
    if (*best_res <= opts.tol * 1e-3) break;
  }
  return best;
}

}  // namespace

std::vector<CMatrix> GramCertificate::u_values(const std::vector<CMatrix>& basis_values, int m) const {
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(factor.rows()));
  for (Eigen::Index i = 0; i < factor.rows(); ++i) {
    CMatrix u = CMatrix::Zero(J * m, m);
    for (int j = 0; j < J; ++j) {
      for (int k = 0; k < K; ++k) {
        const Complex a = factor(i, j * K + k);
        if (a != Complex(0.0)) u.block(j * m, 0, m, m) += a * basis_values[static_cast<std::size_t>(k)];
      }
    }
    out.push_back(std::move(u));
  }
  return out;
}

FeasibilityResult solve_feasibility(const ConstraintMap& cm, const FeasibilityOptions& opts) {
  FeasibilityResult result;
  const HermitianCoords hq(cm.N0);
  Tolerances loose;
  loose.hermitian = 1e-6;

  RVector x = cm.least_norm;
  RVector corr = RVector::Zero(x.size());
  RVector best = cm.least_norm;
  double best_res = std::numeric_limits<double>::infinity();
  double window_start = best_res;
  bool accepted = false;

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const RVector y = cm.project_affine(x);
    const RVector shifted = y + corr;
    const RVector z = hq.to_vec(psd_project(hq.from_vec(shifted), loose));
    corr = shifted - z;
    x = z;
    const double res = (cm.map * z - cm.target).norm();
    if (!std::isfinite(res)) break;
    if (res < best_res) {
      best_res = res;
      best = z;
    }
    if (it % 100 == 0) result.residual_curve.push_back(res);
    if (res <= opts.tol) {
      accepted = true;
      ++it;
      break;
    }
    if ((it + 1) % opts.stall_window == 0) {
      if (best_res > (1.0 - opts.stall_ratio) * window_start) {
        ++it;
        break;
      }
      window_start = best_res;
    }
  }
  result.iterations = it;

  const CMatrix best_q = hq.from_vec(best);
  CMatrix r = factor_psd(best_q);
  double final_res = best_res;
  if (opts.polish) {
    double polished_res = 0.0;
    CMatrix pr = polish_gram(cm, best_q, opts, &polished_res);
    if (polished_res < final_res) {
      r = std::move(pr);
      final_res = polished_res;
      result.polished = true;
    }
    if (final_res > opts.tol) {
      const double cap = 10.0 * std::max(1.0, best_q.trace().real());
      pr = polish_gram(cm, central_gram(cm, cap, opts.interior_iter), opts, &polished_res);
      if (polished_res < final_res) {
        r = std::move(pr);
        final_res = polished_res;
        result.polished = true;
        result.interior_point = true;
      }
    }
  }
  result.residual_curve.push_back(final_res);
  result.best_residual = final_res;
  if (!(accepted || final_res <= opts.tol)) return result;

  GramCertificate cert;
  cert.n = cm.n;
  cert.d = cm.d;
  cert.J = cm.J;
  cert.K = cm.K;
  cert.N0 = cm.N0;
  cert.gram = r * r.adjoint();
  cert.factor = r.adjoint();
  cert.residual = cm.residual(cert.gram);
  cert.iterations = it;
  cert.stage = result.interior_point ? "interior" : result.polished ? "polished" : "projections";
  cert.residual_curve = result.residual_curve;
  for (Eigen::Index i = 0; i < cert.factor.rows(); ++i) {
    std::vector<FreePoly> slots;
    for (int j = 0; j < cm.J; ++j) {
      FreePoly p(cm.d);
      for (int k = 0; k < cm.K; ++k) {
        const Complex a = cert.factor(i, j * cm.K + k);
        if (a != Complex(0.0)) p += a * cm.basis_polys[static_cast<std::size_t>(k)];
      }
      slots.push_back(std::move(p));
    }
    cert.u_polys.push_back(std::move(slots));
  }
  result.certificate = std::move(cert);
  return result;
}

// ---------------------------------------------------------------- verification

CertificateCheck verify_certificate(const GramCertificate& cert, const AlgebraBasis& basis, const PolyMatrix& delta,
                                    const FreePoly& p0, const std::vector<MatrixTuple>& samples, double identity_tol,
                                    double variety_tol) {
  CertificateCheck out;
  std::vector<const FreePoly*> polys;
  for (const auto& e : basis.word_expansions) polys.push_back(&e);
  polys.push_back(&p0);
  for (const MatrixTuple& x : samples) {
    const GdeltaTest g = in_gdelta(delta, x);
    if (!g.inside) throw DomainError("verify_certificate: sample outside G_delta");
    if (!in_variety(basis, x, variety_tol)) throw DomainError("verify_certificate: sample outside V_Lambda");
    const int m = x.size();
    std::vector<CMatrix> vals = eval_many(polys, x);
    const CMatrix p0x = vals.back();
    vals.pop_back();
    const CMatrix dx = eval_matrix(delta, x);
    const CMatrix defect = CMatrix::Identity(cert.J * m, cert.J * m) - dx.adjoint() * dx;
    CMatrix rhs = CMatrix::Zero(m, m);
    for (const CMatrix& u : cert.u_values(vals, m)) rhs += u.adjoint() * defect * u;
    const CMatrix lhs = CMatrix::Identity(m, m) - p0x.adjoint() * p0x;
    const double r = op_norm(lhs - rhs);
    out.per_sample.push_back(r);
    out.max_identity_residual = std::max(out.max_identity_residual, r);
    out.max_p0_norm = std::max(out.max_p0_norm, op_norm(p0x));
    ++out.samples;
  }
  out.passed = out.max_identity_residual <= identity_tol;
  return out;
}

TelescopingCheck telescoping_tail(const PolyMatrix& delta, const MatrixTuple& lambda, const CMatrix& p0_value, int m) {
  const int n = lambda.size();
  const int J = delta.rows();
  const CMatrix dl = eval_matrix(delta, lambda);
  CMatrix f = CMatrix::Zero(J * n, n);
  f.topRows(n) = p0_value;
  const CMatrix defect = CMatrix::Identity(J * n, J * n) - dl.adjoint() * dl;

  CMatrix sum = CMatrix::Zero(n, n);
  CMatrix dk_f = f;  // delta^k F
  for (int k = 0; k < m; ++k) {
    sum += dk_f.adjoint() * defect * dk_f;
    dk_f = dl * dk_f;
  }
  const CMatrix tail = dk_f.adjoint() * dk_f;

  TelescopingCheck t;
  t.tail_norm = op_norm(tail);
  const double dn = op_norm(dl);
  const double pn = op_norm(p0_value);
  t.bound = std::pow(dn, 2.0 * m) * pn * pn;
  t.identity_residual = op_norm(f.adjoint() * f - sum - tail);
  return t;
}

}  // namespace freepick
