// freepick: command-line front end for the Pick interpolation pipeline.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "freepick/commands.hpp"

namespace {

void add_run_flags(CLI::App* cmd, freepick::RunConfig& cfg) {
  cmd->add_option("--tol", cfg.tol, "affine residual accepted by the Gram solver")->envname("FREEPICK_TOL");
  cmd->add_option("--max-iter", cfg.max_iter, "alternating projection budget")->envname("FREEPICK_MAX_ITER");
  cmd->add_option("--seed", cfg.seed, "sampler seed")->envname("FREEPICK_SEED");
  cmd->add_option("--samples", cfg.samples, "number of sampled points")->envname("FREEPICK_SAMPLES");
  cmd->add_option("--max-size", cfg.max_size, "largest sampled matrix size")->envname("FREEPICK_MAX_SIZE");
  cmd->add_option("--margin", cfg.margin, "require ||delta(Lambda)|| < 1 - margin")->envname("FREEPICK_MARGIN");
  cmd->add_option("--threads", cfg.threads, "sampler worker threads (0: all cores)")->envname("FREEPICK_THREADS");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freepick: Pick interpolation for free holomorphic functions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(FREEPICK_TOOL_VERSION));

  freepick::RunConfig cfg;
  std::string report_path;
  std::string problem, realization, certificate, parametrization, point, theta_matrix, theta_realization;
  std::string dump, kind = "variety", data;
  std::optional<double> sup;

  auto* solve = app.add_subcommand("solve", "decide and solve a Pick problem");
  solve->add_option("problem", problem, "problem file")->required();
  solve->add_option("-o,--realization", realization, "write the realization here");
  solve->add_option("--certificate", certificate, "write the Gram certificate here");

  auto* extend = app.add_subcommand("extend", "extend data off a variety (finite stage)");
  extend->add_option("problem", problem, "points and values")->required();
  extend->add_option("-o,--realization", realization, "write the realization here");
  extend->add_option("--sup", sup, "known norm of the data on the variety");

  auto* eval = app.add_subcommand("eval", "evaluate a realization");
  eval->add_option("realization", realization, "realization file")->required();
  eval->add_option("point", point, "matrix tuple file")->required();

  auto* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("problem", problem, "problem file")->required();
  verify->add_option("realization", realization, "realization to check (default: solve afresh)");

  auto* param = app.add_subcommand("parametrize", "build the parametrization of all solutions");
  param->add_option("problem", problem, "problem file")->required();
  param->add_option("-o,--out", parametrization, "write the parametrization here");

  auto* lft = app.add_subcommand("lft", "evaluate the solution for a parameter Theta");
  lft->add_option("parametrization", parametrization, "parametrization file")->required();
  lft->add_option("point", point, "matrix tuple file")->required();
  auto* tm = lft->add_option("--theta", theta_matrix, "constant Theta (square matrix file)");
  lft->add_option("--theta-realization", theta_realization, "Theta as a realization file")->excludes(tm);

  auto* sample = app.add_subcommand("sample", "dump points of G_delta or of the variety");
  sample->add_option("problem", problem, "problem file")->required();
  sample->add_option("--kind", kind, "gdelta or variety")->check(CLI::IsMember({"gdelta", "variety"}));
  sample->add_option("-o,--out", dump, "write the sample dump here");

  auto* oracle = app.add_subcommand("oracle-pick", "classical scalar Pick test and Schur solver");
  oracle->add_option("data", data, "{\"z\": [...], \"w\": [...], \"eval\": [...]}")->required();

  auto* norm = app.add_subcommand("norm", "minimal interpolation norm by bisection");
  norm->add_option("problem", problem, "problem file")->required();

  for (auto* cmd : {solve, extend, verify, param, sample, norm}) add_run_flags(cmd, cfg);
  for (auto* cmd : app.get_subcommands({})) cmd->add_option("--report", report_path, "write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : freepick::kExitInputError;
  }

  freepick::CommandResult result;
  if (*solve) {
    result = freepick::cmd_solve(problem, realization, certificate, cfg);
  } else if (*extend) {
    result = freepick::cmd_extend(problem, sup, realization, cfg);
  } else if (*eval) {
    result = freepick::cmd_eval(realization, point);
  } else if (*verify) {
    result = freepick::cmd_verify(problem, realization, cfg);
  } else if (*param) {
    result = freepick::cmd_parametrize(problem, parametrization, cfg);
  } else if (*lft) {
    result = freepick::cmd_lft(parametrization, theta_matrix, theta_realization, point);
  } else if (*sample) {
    result = freepick::cmd_sample(problem, kind, dump, cfg);
  } else if (*oracle) {
    result = freepick::cmd_oracle_pick(data);
  } else if (*norm) {
    result = freepick::cmd_norm(problem, cfg);
  }

  if (report_path.empty()) {
    std::cout << result.report.dump(2) << '\n';
  } else {
    try {
      freepick::write_json_file(report_path, result.report);
    } catch (const freepick::Error& e) {
      std::cerr << "freepick: " << e.what() << '\n';
      return freepick::kExitInputError;
    }
  }
  if (result.exit_code == freepick::kExitInputError && result.report.contains("message")) {
    std::cerr << "freepick: " << result.report["message"].get<std::string>() << '\n';
  }
  return result.exit_code;
}
