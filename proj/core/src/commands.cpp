#include "freepick/commands.hpp"

#include <algorithm>
#include <cmath>

namespace freepick {

namespace {

constexpr double kInterpolationTol = 1e-6;
constexpr double kColligationTol = 1e-9;
constexpr double kGramTol = 1e-8;
constexpr double kIdentityTol = 1e-7;
constexpr double kContractTol = 1e-6;
constexpr double kDirectSumTol = 1e-9;
constexpr double kSimilarityTol = 1e-6;
constexpr double kSimilarityCond = 10.0;
constexpr int kTelescopeDepth = 40;

Json check(double value, double tol) {
  return Json{{"value", value}, {"tol", tol}, {"pass", value <= tol}};
}

std::string eigen_version() {
  return std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
         std::to_string(EIGEN_MINOR_VERSION);
}

std::string json_version() {
  return std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
}

// Maps an exception to the input-error / undecided exit codes.
template <typename Fn>
CommandResult guarded(const std::string& command, const RunConfig& cfg, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericsError& e) {
    CommandResult r{kExitUndecided, base_report(command, cfg)};
    r.report["status"] = "undecided";
    r.report["message"] = e.what();
    return r;
  } catch (const ParseError& e) {
    CommandResult r{kExitInputError, base_report(command, cfg)};
    r.report["status"] = "input_error";
    r.report["message"] = std::string(e.what()) + " at position " + std::to_string(e.position());
    return r;
  } catch (const Error& e) {
    CommandResult r{kExitInputError, base_report(command, cfg)};
    r.report["status"] = "input_error";
    r.report["message"] = e.what();
    return r;
  } catch (const nlohmann::json::exception& e) {
    CommandResult r{kExitInputError, base_report(command, cfg)};
    r.report["status"] = "input_error";
    r.report["message"] = e.what();
    return r;
  }
}

// Lambda in G_delta is checked after membership, which does not depend on it.
PickProblem load_problem(const std::string& path) {
  PickProblem p = problem_from_json(read_json_file(path));
  p.validate_shapes();
  return p;
}

PickProblem scaled_problem(const PickProblem& p, double t) {
  PickProblem q = p;
  for (PickPoint& pt : q.points) pt.w /= t;
  return q;
}

std::optional<GramCertificate> feasible_at(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                                           const RunConfig& cfg) {
  FeasibilityOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  return solve_feasibility(build_constraint_map(basis, delta, w), opts).certificate;
}

Json feasibility_json(const FeasibilityResult& f) {
  return Json{{"best_residual", f.best_residual},
              {"iterations", f.iterations},
              {"polished", f.polished},
              {"residual_curve", f.residual_curve}};
}

}  // namespace

SampleConfig RunConfig::sample_config(int count) const {
  SampleConfig s;
  s.seed = seed;
  s.max_size = max_size;
  s.count = count;
  s.threads = threads;
  return s;
}

Json RunConfig::to_json() const {
  return Json{{"tol", tol}, {"max_iter", max_iter}, {"seed", seed}, {"samples", samples},
              {"max_size", max_size}, {"margin", margin}};
}

Json base_report(const std::string& command, const RunConfig& cfg) {
  return Json{{"command", command},
              {"status", "input_error"},
              {"residuals", Json::object()},
              {"norms", Json::object()},
              {"seed", cfg.seed},
              {"config", cfg.to_json()},
              {"versions", {{"freepick", FREEPICK_VERSION}, {"eigen", eigen_version()}, {"nlohmann_json", json_version()}}}};
}

SolveOutcome solve_pipeline(const PickProblem& problem, const RunConfig& cfg) {
  SolveOutcome out;
  out.folded = problem.fold();
  const Tolerances& tol = default_tolerances();
  out.basis = compute_algebra(out.folded.x, tol);
  out.p0 = membership(*out.basis, out.folded.w, tol.membership);
  if (!out.p0) {
    out.exit_code = kExitNotInAlgebra;
    out.status = "not_in_algebra";
    out.message = "W is not in the algebra generated by Lambda";
    return out;
  }
  problem.validate(cfg.margin);
  FeasibilityOptions opts;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  out.feasibility = solve_feasibility(build_constraint_map(*out.basis, problem.delta, out.folded.w, tol), opts);
  if (!out.feasibility.certificate) {
    out.exit_code = kExitUndecided;
    out.status = "undecided";
    out.message = "no Gram certificate found; likely unsolvable";
    return out;
  }
  out.certificate = out.feasibility.certificate;
  out.realization = lurking_isometry(*out.basis, problem.delta, out.folded.w, *out.certificate, tol);
  out.exit_code = kExitSolved;
  out.status = "solved";
  return out;
}

bool run_checks(const PickProblem& problem, const SolveOutcome& out, const Realization& r, const RunConfig& cfg,
                Json& report) {
  const PolyMatrix& delta = problem.delta;
  const MatrixTuple& lambda = out.folded.x;
  Json checks = Json::object();

  checks["interpolation"] = check(op_norm(eval_transfer(r, lambda) - out.folded.w), kInterpolationTol);
  const CMatrix v = r.colligation();
  checks["colligation_isometry"] = check(isometry_defect(v), kColligationTol);
  checks["colligation_coisometry"] = check(isometry_defect(v.adjoint()), kColligationTol);

  if (out.certificate) {
    const LurkingVectors lv = lurking_vectors(*out.basis, delta, out.folded.w, *out.certificate);
    checks["gram_equality"] = check(op_norm(lv.p.adjoint() * lv.p - lv.q.adjoint() * lv.q), kGramTol);

    std::vector<MatrixTuple> pts;
    for (const VarietySample& s : sample_variety(*out.basis, delta, cfg.sample_config(std::min(cfg.samples, 20)))) {
      pts.push_back(s.point);
    }
    const CertificateCheck cc = verify_certificate(*out.certificate, *out.basis, delta, *out.p0, pts, kIdentityTol);
    Json id = check(cc.max_identity_residual, kIdentityTol);
    id["samples"] = cc.samples;
    checks["certificate_identity"] = id;

    const TelescopingCheck tc = telescoping_tail(delta, lambda, out.folded.w, kTelescopeDepth);
    checks["telescoping_tail"] = Json{{"tail", tc.tail_norm},
                                      {"bound", tc.bound},
                                      {"identity_residual", tc.identity_residual},
                                      {"pass", tc.tail_norm <= tc.bound + 1e-12}};
  }

  const std::vector<MatrixTuple> gs = sample_gdelta(delta, cfg.sample_config(cfg.samples));
  double max_phi = 0.0;
  std::vector<CMatrix> values;
  for (const MatrixTuple& x : gs) {
    values.push_back(eval_transfer(r, x));
    max_phi = std::max(max_phi, op_norm(values.back()));
  }
  Json contract = check(max_phi, 1.0 + kContractTol);
  contract["samples"] = gs.size();
  checks["contractivity"] = contract;

  double ds = 0.0;
  for (std::size_t i = 0; i + 1 < gs.size() && i < 20; i += 2) {
    const CMatrix joint = eval_transfer(r, direct_sum(gs[i], gs[i + 1]));
    ds = std::max(ds, op_norm(joint - block_diag(values[i], values[i + 1])));
  }
  checks["direct_sum"] = check(ds, kDirectSumTol);

  // s^{-1} x s with cond(s) <= 10, pulled toward a unitary while outside G_delta.
  double sim = 0.0;
  for (std::size_t i = 0; i < gs.size() && i < 10; ++i) {
    Rng rng(cfg.seed, (3ULL << 40) + i);
    const RandomSimilarity rs = random_similarity(gs[i].size(), kSimilarityCond, rng);
    for (double c = 1.0; c > 1e-3; c *= 0.5) {
      const CMatrix s = rs.at(c);
      const MatrixTuple y = gs[i].similar(s);
      if (!in_gdelta(delta, y).inside) continue;
      const Eigen::PartialPivLU<CMatrix> lu(s);
      const CMatrix expect = lu.solve(values[i] * s);
      const double cond = std::pow(kSimilarityCond, c);
      sim = std::max(sim, op_norm(eval_transfer(r, y) - expect) / cond);
      break;
    }
  }
  checks["similarity"] = check(sim, kSimilarityTol);

  bool all = true;
  for (const auto& [name, c] : checks.items()) all = all && c.at("pass").get<bool>();
  report["checks"] = checks;
  report["verified"] = all;
  return all;
}

std::optional<double> minimal_norm(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                                   const RunConfig& cfg) {
  if (w.norm() == 0.0) return 0.0;
  auto feasible = [&](double t) { return feasible_at(basis, delta, w / t, cfg).has_value(); };
  double lo = op_norm(w);  // ||phi(Lambda)|| never exceeds the norm of phi
  if (feasible(lo)) return lo;
  double hi = 2.0 * lo;
  int grow = 0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 30) return std::nullopt;
  }
  while (hi - lo > 1e-4 * hi) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------------------- commands

CommandResult cmd_solve(const std::string& problem_path, const std::string& realization_out,
                        const std::string& certificate_out, const RunConfig& cfg) {
  return guarded("solve", cfg, [&] {
    CommandResult res{kExitInputError, base_report("solve", cfg)};
    Json& rep = res.report;
    const PickProblem problem = load_problem(problem_path);
    const SolveOutcome out = solve_pipeline(problem, cfg);
    res.exit_code = out.exit_code;
    rep["status"] = out.status;
    rep["message"] = out.message;
    rep["norms"]["delta_lambda"] = op_norm(eval_matrix(problem.delta, out.folded.x));
    rep["norms"]["W"] = op_norm(out.folded.w);
    rep["algebra_dim"] = out.basis->dim();
    if (!out.p0) return res;

    rep["p0"] = out.p0->to_string();
    rep["residuals"]["sdp"] = out.feasibility.best_residual;
    rep["feasibility"] = feasibility_json(out.feasibility);
    if (!out.certificate) {
      const SupEstimate est = estimate_sup(*out.basis, problem.delta, *out.p0, cfg.sample_config(cfg.samples));
      rep["norms"]["sup_estimate"] = est.value;
      rep["counterexample"] = Json{{"sup_estimate", est.value},
                                   {"exceeds_one", est.value > 1.0 + kContractTol},
                                   {"samples", est.samples},
                                   {"witness", tuple_to_json(est.witness)}};
      return res;
    }
    if (!certificate_out.empty()) write_json_file(certificate_out, certificate_to_json(*out.certificate));
    if (!realization_out.empty()) write_json_file(realization_out, realization_to_json(*out.realization));
    run_checks(problem, out, *out.realization, cfg, rep);
    rep["residuals"]["interpolation"] = rep["checks"]["interpolation"]["value"];
    rep["norms"]["phi_max_sampled"] = rep["checks"]["contractivity"]["value"];
    return res;
  });
}

CommandResult cmd_extend(const std::string& problem_path, std::optional<double> sup,
                         const std::string& realization_out, const RunConfig& cfg) {
  return guarded("extend", cfg, [&] {
    CommandResult res{kExitInputError, base_report("extend", cfg)};
    Json& rep = res.report;
    const PickProblem problem = load_problem(problem_path);
    rep["finite_stage"] = true;
    rep["points"] = problem.points.size();
    const PickPoint f = problem.fold();
    const AlgebraBasis basis = compute_algebra(f.x);
    if (!membership(basis, f.w, default_tolerances().membership)) {
      res.exit_code = kExitNotInAlgebra;
      rep["status"] = "not_in_algebra";
      rep["message"] = "inconsistent data: no polynomial takes the given values at every point";
      return res;
    }
    problem.validate(cfg.margin);
    double scale = 1.0;
    if (sup) {
      if (!(*sup > 0.0)) throw DomainError("extend: --sup must be positive");
      scale = *sup;
      rep["scale_source"] = "user";
    } else {
      const std::optional<double> t = minimal_norm(basis, problem.delta, f.w, cfg);
      if (!t) {
        res.exit_code = kExitUndecided;
        rep["status"] = "undecided";
        rep["message"] = "no feasible scale found";
        return res;
      }
      scale = *t > 0.0 ? *t : 1.0;
      rep["scale_source"] = "minimal_norm";
    }
    rep["norms"]["scale"] = scale;
    const PickProblem normalized = scaled_problem(problem, scale);
    const SolveOutcome out = solve_pipeline(normalized, cfg);
    res.exit_code = out.exit_code;
    rep["status"] = out.status;
    rep["message"] = out.message;
    rep["residuals"]["sdp"] = out.feasibility.best_residual;
    if (!out.realization) return res;
    // The stored colligation realizes phi / scale, a unit-ball function.
    rep["norms"]["extension_norm_bound"] = scale;
    rep["norms"]["normalized_norm_bound"] = 1.0;
    if (!realization_out.empty()) write_json_file(realization_out, realization_to_json(*out.realization, scale));
    run_checks(normalized, out, *out.realization, cfg, rep);
    return res;
  });
}

CommandResult cmd_eval(const std::string& realization_path, const std::string& point_path) {
  const RunConfig cfg;
  return guarded("eval", cfg, [&] {
    CommandResult res{kExitInputError, base_report("eval", cfg)};
    const StoredRealization s = realization_from_json(read_json_file(realization_path));
    const MatrixTuple x = tuple_from_json(read_json_file(point_path), s.r.delta.dims());
    const CMatrix value = s.scale * eval_transfer(s.r, x);
    res.report["status"] = "ok";
    res.report["n"] = x.size();
    res.report["value"] = matrix_to_json(value);
    res.report["norms"]["value"] = op_norm(value);
    res.report["norms"]["delta_x"] = op_norm(eval_matrix(s.r.delta, x));
    res.exit_code = kExitSolved;
    return res;
  });
}

CommandResult cmd_verify(const std::string& problem_path, const std::string& realization_path, const RunConfig& cfg) {
  return guarded("verify", cfg, [&] {
    CommandResult res{kExitInputError, base_report("verify", cfg)};
    const PickProblem problem = load_problem(problem_path);
    const SolveOutcome out = solve_pipeline(problem, cfg);
    res.report["status"] = out.status;
    if (!out.realization) {
      res.exit_code = out.exit_code;
      res.report["message"] = out.message;
      return res;
    }
    Realization r = *out.realization;
    if (!realization_path.empty()) {
      const StoredRealization s = realization_from_json(read_json_file(realization_path));
      if (s.scale != 1.0) throw DomainError("verify: rescaled realizations are checked through extend");
      r = s.r;
    }
    const bool ok = run_checks(problem, out, r, cfg, res.report);
    res.report["status"] = ok ? "verified" : "failed";
    res.exit_code = ok ? kExitSolved : kExitUndecided;
    return res;
  });
}

CommandResult cmd_parametrize(const std::string& problem_path, const std::string& parametrization_out,
                              const RunConfig& cfg) {
  return guarded("parametrize", cfg, [&] {
    CommandResult res{kExitInputError, base_report("parametrize", cfg)};
    const PickProblem problem = load_problem(problem_path);
    const SolveOutcome out = solve_pipeline(problem, cfg);
    res.exit_code = out.exit_code;
    res.report["status"] = out.status;
    res.report["message"] = out.message;
    if (!out.certificate) return res;
    const NevanlinnaData nd = build_parametrization(*out.basis, problem.delta, out.folded.w, *out.certificate);
    res.report["mu"] = nd.mu;
    res.report["ambient"] = nd.ambient;
    res.report["residuals"]["u_unitarity"] = isometry_defect(nd.u);
    if (!parametrization_out.empty()) write_json_file(parametrization_out, parametrization_to_json(nd));
    return res;
  });
}

CommandResult cmd_lft(const std::string& parametrization_path, const std::string& theta_matrix_path,
                      const std::string& theta_realization_path, const std::string& point_path) {
  const RunConfig cfg;
  return guarded("lft", cfg, [&] {
    CommandResult res{kExitInputError, base_report("lft", cfg)};
    const NevanlinnaData nd = parametrization_from_json(read_json_file(parametrization_path));
    ThetaEvaluator theta = constant_theta(CMatrix::Zero(nd.mu, nd.mu));
    std::string kind = "zero";
    if (!theta_matrix_path.empty() && !theta_realization_path.empty()) {
      throw DomainError("lft: give Theta either as a matrix or as a realization");
    }
    if (!theta_matrix_path.empty()) {
      const Json j = read_json_file(theta_matrix_path);
      const CMatrix t0 = nd.mu == 0 ? CMatrix(0, 0) : square_from_json(j.is_object() ? j.at("Theta") : j);
      if (t0.rows() != nd.mu) throw DimensionError("lft: Theta must be " + std::to_string(nd.mu) + " square");
      theta = constant_theta(t0);
      kind = "constant";
    } else if (!theta_realization_path.empty()) {
      const StoredRealization s = realization_from_json(read_json_file(theta_realization_path));
      if (s.r.io_dim != nd.mu) throw DimensionError("lft: Theta realization must have io dimension mu");
      theta = realization_theta(s.r);
      kind = "realization";
    }
    const MatrixTuple x = tuple_from_json(read_json_file(point_path), nd.g.delta.dims());
    const CMatrix value = lft(nd, theta, x);
    res.exit_code = kExitSolved;
    res.report["status"] = "ok";
    res.report["theta"] = kind;
    res.report["value"] = matrix_to_json(value);
    res.report["norms"]["value"] = op_norm(value);
    return res;
  });
}

CommandResult cmd_sample(const std::string& problem_path, const std::string& kind, const std::string& dump_out,
                         const RunConfig& cfg) {
  return guarded("sample", cfg, [&] {
    CommandResult res{kExitInputError, base_report("sample", cfg)};
    if (kind != "gdelta" && kind != "variety") throw DomainError("sample: kind must be gdelta or variety");
    const PickProblem problem = load_problem(problem_path);
    const PickPoint f = problem.fold();
    const AlgebraBasis basis = compute_algebra(f.x);
    const std::optional<FreePoly> p0 = membership(basis, f.w, default_tolerances().membership);
    problem.validate(cfg.margin);

    std::vector<MatrixTuple> pts;
    if (kind == "gdelta") {
      pts = sample_gdelta(problem.delta, cfg.sample_config(cfg.samples));
    } else {
      for (VarietySample& s : sample_variety(basis, problem.delta, cfg.sample_config(cfg.samples))) {
        pts.push_back(std::move(s.point));
      }
    }
    std::vector<SampleRecord> recs;
    double max_p0 = 0.0;
    for (MatrixTuple& x : pts) {
      SampleRecord rec;
      rec.delta_norm = op_norm(eval_matrix(problem.delta, x));
      if (p0 && kind == "variety") {
        rec.p0_norm = op_norm(eval(*p0, x));
        max_p0 = std::max(max_p0, *rec.p0_norm);
      }
      rec.x = std::move(x);
      recs.push_back(std::move(rec));
    }
    res.exit_code = kExitSolved;
    res.report["status"] = "ok";
    res.report["kind"] = kind;
    res.report["count"] = recs.size();
    if (p0 && kind == "variety") res.report["norms"]["p0_max"] = max_p0;
    if (!dump_out.empty()) write_json_file(dump_out, sample_dump_to_json(recs, cfg.seed));
    return res;
  });
}

CommandResult cmd_oracle_pick(const std::string& data_path) {
  const RunConfig cfg;
  return guarded("oracle-pick", cfg, [&] {
    CommandResult res{kExitInputError, base_report("oracle-pick", cfg)};
    const Json j = read_json_file(data_path);
    ScalarPickData data;
    for (const Json& z : j.at("z")) data.z.push_back(complex_from_json(z));
    for (const Json& w : j.at("w")) data.w.push_back(complex_from_json(w));
    data.validate();
    const CMatrix pm = pick_matrix(data);
    const double min_eig = pick_min_eigenvalue(data);
    const std::optional<SchurFunction> f = schur_solve(data);
    Json& rep = res.report;
    rep["pick_matrix"] = matrix_to_json(pm);
    rep["min_eigenvalue"] = min_eig;
    rep["psd"] = min_eig >= -1e-8;
    rep["solvable"] = f.has_value();
    if (f) {
      Json steps = Json::array();
      for (const auto& s : f->steps()) steps.push_back(Json{{"node", {s.node.real(), s.node.imag()}},
                                                            {"gamma", {s.gamma.real(), s.gamma.imag()}}});
      rep["schur_steps"] = steps;
      rep["schur_tail"] = {f->tail().real(), f->tail().imag()};
      if (j.contains("eval")) {
        Json vals = Json::array();
        for (const Json& z : j.at("eval")) {
          const Complex v = (*f)(complex_from_json(z));
          vals.push_back({v.real(), v.imag()});
        }
        rep["values"] = vals;
      }
    }
    rep["status"] = f ? "solved" : "unsolvable";
    res.exit_code = f ? kExitSolved : kExitUndecided;
    return res;
  });
}

CommandResult cmd_norm(const std::string& problem_path, const RunConfig& cfg) {
  return guarded("norm", cfg, [&] {
    CommandResult res{kExitInputError, base_report("norm", cfg)};
    const PickProblem problem = load_problem(problem_path);
    const PickPoint f = problem.fold();
    const AlgebraBasis basis = compute_algebra(f.x);
    if (!membership(basis, f.w, default_tolerances().membership)) {
      res.exit_code = kExitNotInAlgebra;
      res.report["status"] = "not_in_algebra";
      return res;
    }
    problem.validate(cfg.margin);
    const std::optional<double> t = minimal_norm(basis, problem.delta, f.w, cfg);
    if (!t) {
      res.exit_code = kExitUndecided;
      res.report["status"] = "undecided";
      return res;
    }
    res.exit_code = kExitSolved;
    res.report["status"] = "solved";
    res.report["norms"]["minimal"] = *t;
    res.report["norms"]["relative_precision"] = 1e-4;
    return res;
  });
}

}  // namespace freepick
