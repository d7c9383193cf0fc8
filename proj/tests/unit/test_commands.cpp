#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "freepick/commands.hpp"
#include "instances.hpp"

namespace {

using namespace freepick;
using fptest::scalar_point;
using fptest::temp_path;

std::string write_problem(const std::string& name, const PickProblem& p) {
  const std::string path = temp_path(name);
  write_json_file(path, problem_to_json(p));
  return path;
}

std::string write_point(const std::string& name, const MatrixTuple& x) {
  const std::string path = temp_path(name);
  write_json_file(path, Json{{"X", tuple_to_json(x)}});
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Complex value00(const Json& report) { return complex_from_json(report["value"][0]); }

PickProblem nilpotent_problem() {
  CMatrix nil = CMatrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  CMatrix w = CMatrix::Zero(2, 2);
  w(0, 0) = 1.0;
  return fptest::one_point(PolyMatrix::scalar_variable(1), MatrixTuple({nil}), w);
}

TEST(CmdSolve, RejectsNilpotentExample) {
  const CommandResult r = cmd_solve(write_problem("nil.json", nilpotent_problem()), "", "", {});
  EXPECT_EQ(r.exit_code, kExitNotInAlgebra);
  EXPECT_EQ(r.report["status"], "not_in_algebra");
}

TEST(CmdSolve, ScalarSolvedAndEvaluated) {
  const std::string problem = write_problem("half_quarter.json", fptest::scalar_problem({0.5}, {0.25}));
  const std::string real = temp_path("half_quarter_real.json");
  const std::string cert = temp_path("half_quarter_cert.json");
  const CommandResult r = cmd_solve(problem, real, cert, {});
  ASSERT_EQ(r.exit_code, kExitSolved) << r.report.dump(2);
  EXPECT_EQ(r.report["status"], "solved");
  EXPECT_TRUE(r.report["verified"].get<bool>());
  for (const char* key : {"status", "residuals", "norms", "seed", "versions"}) EXPECT_TRUE(r.report.contains(key));

  const CommandResult e = cmd_eval(real, write_point("half.json", scalar_point({0.5})));
  ASSERT_EQ(e.exit_code, kExitSolved);
  EXPECT_NEAR(std::abs(value00(e.report) - 0.25), 0.0, 1e-6);

  const CommandResult v = cmd_verify(problem, real, {});
  EXPECT_EQ(v.exit_code, kExitSolved);
  EXPECT_EQ(v.report["status"], "verified");
  for (const auto& [name, check] : v.report["checks"].items()) EXPECT_TRUE(check["pass"].get<bool>()) << name;
}

TEST(CmdSolve, UnsolvableDataReportsCounterexample) {
  const CommandResult r = cmd_solve(write_problem("unsolvable.json", fptest::scalar_problem({0.0, 0.5}, {0.0, 0.6})),
                                    "", "", {});
  EXPECT_EQ(r.exit_code, kExitUndecided);
  EXPECT_EQ(r.report["status"], "undecided");
  ASSERT_TRUE(r.report.contains("counterexample"));
  EXPECT_TRUE(r.report["counterexample"]["exceeds_one"].get<bool>());
}

TEST(CmdSolve, InputErrors) {
  EXPECT_EQ(cmd_solve(temp_path("missing.json"), "", "", {}).exit_code, kExitInputError);
  const std::string bad = temp_path("bad.json");
  std::ofstream(bad) << "{\"d\": 1, \"delta\": [[\"x1 *\"]], \"points\": []}";
  const CommandResult r = cmd_solve(bad, "", "", {});
  EXPECT_EQ(r.exit_code, kExitInputError);
  EXPECT_EQ(r.report["status"], "input_error");
  EXPECT_EQ(cmd_solve(write_problem("outside.json", fptest::scalar_problem({1.2}, {0.0})), "", "", {}).exit_code,
            kExitInputError);
  RunConfig margin;
  margin.margin = 0.6;
  EXPECT_EQ(cmd_solve(write_problem("margin.json", fptest::scalar_problem({0.5}, {0.0})), "", "", margin).exit_code,
            kExitInputError);
}

TEST(CmdEval, SwapRealization) {
  CMatrix v(2, 2);
  v << 0.0, 1.0, 1.0, 0.0;
  const std::string path = temp_path("swap.json");
  write_json_file(path, realization_to_json(split_colligation(PolyMatrix::scalar_variable(1), v, 1)));
  const CommandResult r = cmd_eval(path, write_point("seven.json", scalar_point({0.7})));
  ASSERT_EQ(r.exit_code, kExitSolved);
  EXPECT_NEAR(std::abs(value00(r.report) - 0.7), 0.0, 1e-15);
  EXPECT_EQ(cmd_eval(path, write_point("outside_point.json", scalar_point({1.5}))).exit_code, kExitInputError);
}

TEST(CmdParametrize, LftAgreesWithRealization) {
  Rng rng(80, 0);
  const std::string problem = write_problem("param.json", fptest::random_solvable("row_ball", 2, rng));
  const std::string real = temp_path("param_real.json");
  ASSERT_EQ(cmd_solve(problem, real, "", {}).exit_code, kExitSolved);
  const std::string param = temp_path("param_out.json");
  const CommandResult p = cmd_parametrize(problem, param, {});
  ASSERT_EQ(p.exit_code, kExitSolved) << p.report.dump(2);
  EXPECT_LE(p.report["residuals"]["u_unitarity"].get<double>(), 1e-9);

  // Both runs are deterministic, so the parametrization is built from the same certificate.
  const Json pj = read_json_file(param);
  const std::string theta = temp_path("theta.json");
  write_json_file(theta, pj["theta_colligation"]);
  const std::string point = write_point("param_point.json", fptest::random_point(PolyMatrix::row_ball(2), 2, rng));
  const CommandResult e = cmd_eval(real, point);
  const CommandResult l = cmd_lft(param, theta, "", point);
  ASSERT_EQ(l.exit_code, kExitSolved) << l.report.dump(2);
  const int n = 2;
  const CMatrix ev = matrix_from_json(e.report["value"], n, n);
  const CMatrix lv = matrix_from_json(l.report["value"], n, n);
  EXPECT_LE(op_norm(ev - lv), 1e-8);

  const CommandResult zero = cmd_lft(param, "", "", point);
  EXPECT_EQ(zero.exit_code, kExitSolved);
  EXPECT_EQ(zero.report["theta"], "zero");
  EXPECT_EQ(cmd_lft(param, theta, real, point).exit_code, kExitInputError);
}

TEST(CmdSample, DumpsBothKinds) {
  Rng rng(81, 0);
  const std::string problem = write_problem("sample.json", fptest::random_solvable("bidisk", 2, rng));
  RunConfig cfg;
  cfg.samples = 15;
  const std::string dump = temp_path("sample_dump.json");
  const CommandResult g = cmd_sample(problem, "gdelta", dump, cfg);
  ASSERT_EQ(g.exit_code, kExitSolved);
  const Json d = read_json_file(dump);
  EXPECT_EQ(d["count"], 15);
  for (const Json& s : d["samples"]) EXPECT_LT(s["delta_norm"].get<double>(), 1.0);
  const CommandResult v = cmd_sample(problem, "variety", dump, cfg);
  ASSERT_EQ(v.exit_code, kExitSolved);
  EXPECT_LE(v.report["norms"]["p0_max"].get<double>(), 1.0 + 1e-6);
  EXPECT_EQ(cmd_sample(problem, "other", dump, cfg).exit_code, kExitInputError);
}

TEST(CmdOraclePick, Examples) {
  const std::string path = temp_path("oracle.json");
  write_json_file(path, Json::parse(R"({"z": [0, 0.5], "w": [0, 0.25], "eval": [0.5, [0, 0.3]]})"));
  const CommandResult r = cmd_oracle_pick(path);
  EXPECT_EQ(r.exit_code, kExitSolved);
  EXPECT_TRUE(r.report["psd"].get<bool>());
  EXPECT_NEAR(std::abs(complex_from_json(r.report["values"][0]) - 0.25), 0.0, 1e-10);
  write_json_file(path, Json::parse(R"({"z": [0, 0.5], "w": [0, 0.6]})"));
  const CommandResult u = cmd_oracle_pick(path);
  EXPECT_EQ(u.exit_code, kExitUndecided);
  EXPECT_EQ(u.report["status"], "unsolvable");
  write_json_file(path, Json::parse(R"({"z": [1.0], "w": [0]})"));
  EXPECT_EQ(cmd_oracle_pick(path).exit_code, kExitInputError);
}

TEST(CmdNorm, Examples) {
  const CommandResult zero = cmd_norm(write_problem("norm_zero.json", fptest::scalar_problem({0.0}, {0.0})), {});
  ASSERT_EQ(zero.exit_code, kExitSolved);
  EXPECT_EQ(zero.report["norms"]["minimal"].get<double>(), 0.0);
  const CommandResult one =
      cmd_norm(write_problem("norm_one.json", fptest::scalar_problem({0.0, 0.5}, {0.0, 0.5})), {});
  ASSERT_EQ(one.exit_code, kExitSolved);
  EXPECT_NEAR(one.report["norms"]["minimal"].get<double>(), 1.0, 2e-4);
  EXPECT_EQ(cmd_norm(write_problem("norm_nil.json", nilpotent_problem()), {}).exit_code, kExitNotInAlgebra);
}

TEST(CmdNorm, MonotoneInTarget) {
  // For nodes 0 and 0.5 with values 0 and w the minimal norm is 2 |w|.
  double prev = 0.0;
  for (double w : {0.1, 0.2, 0.35, 0.5, 0.7}) {
    const CommandResult r =
        cmd_norm(write_problem("norm_grid.json", fptest::scalar_problem({0.0, 0.5}, {0.0, w})), {});
    ASSERT_EQ(r.exit_code, kExitSolved);
    const double t = r.report["norms"]["minimal"].get<double>();
    EXPECT_NEAR(t, 2.0 * w, 2e-4 * 2.0 * w);
    EXPECT_GT(t, prev);
    prev = t;
  }
}

PickProblem diagonal_bidisk(const std::vector<Complex>& z, const std::vector<Complex>& w) {
  PickProblem p;
  p.d = 2;
  p.delta = PolyMatrix::polydisk(2);
  for (std::size_t i = 0; i < z.size(); ++i) p.points.push_back({scalar_point({z[i], z[i]}), fptest::diag({w[i]})});
  return p;
}

TEST(CmdExtend, DiagonalOfTheBidisk) {
  // f(z) = z is the only Schur function through two of its own points.
  const std::string problem = write_problem("extend.json", diagonal_bidisk({0.1, Complex(-0.3, 0.4)},
                                                                           {0.1, Complex(-0.3, 0.4)}));
  const std::string real = temp_path("extend_real.json");
  const CommandResult r = cmd_extend(problem, 1.0, real, {});
  ASSERT_EQ(r.exit_code, kExitSolved) << r.report.dump(2);
  EXPECT_TRUE(r.report["finite_stage"].get<bool>());
  for (Complex z : {Complex(0.5, 0.0), Complex(0.0, -0.6)}) {
    const CommandResult e = cmd_eval(real, write_point("extend_point.json", scalar_point({z, z})));
    EXPECT_NEAR(std::abs(value00(e.report) - z), 0.0, 1e-6);
  }
}

TEST(CmdExtend, RescalesAndRejectsInconsistentData) {
  const std::string problem = write_problem("extend_scaled.json", diagonal_bidisk({0.0, 0.5}, {0.0, 0.8}));
  const std::string real = temp_path("extend_scaled_real.json");
  const CommandResult r = cmd_extend(problem, std::nullopt, real, {});
  ASSERT_EQ(r.exit_code, kExitSolved) << r.report.dump(2);
  EXPECT_EQ(r.report["scale_source"], "minimal_norm");
  EXPECT_NEAR(r.report["norms"]["scale"].get<double>(), 1.6, 1e-3);
  const CommandResult e = cmd_eval(real, write_point("extend_scaled_point.json", scalar_point({0.5, 0.5})));
  EXPECT_NEAR(std::abs(value00(e.report) - 0.8), 0.0, 1e-6);

  const CommandResult bad = cmd_extend(write_problem("extend_bad.json", diagonal_bidisk({0.2, 0.2}, {0.0, 0.1})),
                                       std::nullopt, "", {});
  EXPECT_EQ(bad.exit_code, kExitNotInAlgebra);
}

TEST(Tool, ExitCodesAndDeterminism) {
  const std::string nil = write_problem("tool_nil.json", nilpotent_problem());
  EXPECT_EQ(fptest::run_tool("solve " + nil), kExitNotInAlgebra);
  EXPECT_EQ(fptest::run_tool("--help"), 0);
  EXPECT_EQ(fptest::run_tool("solve " + nil + " --no-such-flag"), kExitInputError);
  EXPECT_EQ(fptest::run_tool("solve " + temp_path("tool_missing.json")), kExitInputError);

  const std::string problem = write_problem("tool_det.json", fptest::scalar_problem({0.0, 0.5}, {0.1, 0.3}));
  const std::string a = temp_path("tool_report_a.json");
  const std::string b = temp_path("tool_report_b.json");
  ASSERT_EQ(fptest::run_tool("solve " + problem + " --seed 3 --samples 20 --report " + a), kExitSolved);
  ASSERT_EQ(fptest::run_tool("solve " + problem + " --seed 3 --samples 20 --report " + b), kExitSolved);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Tool, EnvironmentMirrorsFlags) {
  const std::string problem = write_problem("tool_env.json", fptest::scalar_problem({0.5}, {0.25}));
  const std::string report = temp_path("tool_env_report.json");
  ::setenv("FREEPICK_SEED", "5", 1);
  ASSERT_EQ(fptest::run_tool("norm " + problem + " --report " + report), kExitSolved);
  EXPECT_EQ(read_json_file(report)["seed"], 5);
  ASSERT_EQ(fptest::run_tool("norm " + problem + " --seed 7 --report " + report), kExitSolved);
  EXPECT_EQ(read_json_file(report)["seed"], 7);
  ::unsetenv("FREEPICK_SEED");
}

}  // namespace
