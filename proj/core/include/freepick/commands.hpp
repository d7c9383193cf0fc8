#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "freepick/json_io.hpp"
#include "freepick/oracle.hpp"

namespace freepick {

enum ExitCode : int {
  kExitSolved = 0,
  kExitInputError = 1,
  kExitNotInAlgebra = 2,
  kExitUndecided = 3,
};

/// Settings shared by every command.  The tool fills them from flags, then
/// FREEPICK_* environment variables, then these defaults.
struct RunConfig {
  double tol = 1e-9;
  int max_iter = 50000;
  std::uint64_t seed = 0;
  int samples = 100;
  int max_size = 4;
  double margin = 0.0;
  int threads = 0;

  SampleConfig sample_config(int count) const;
  Json to_json() const;
};

/// Everything the solve pipeline produced for one folded problem.
struct SolveOutcome {
  int exit_code = kExitInputError;
  std::string status;
  std::string message;
  PickPoint folded;
  std::optional<AlgebraBasis> basis;
  std::optional<FreePoly> p0;
  std::optional<GramCertificate> certificate;
  std::optional<Realization> realization;
  FeasibilityResult feasibility;
};

/// membership, Gram feasibility and the lurking isometry; no verification.
SolveOutcome solve_pipeline(const PickProblem& problem, const RunConfig& cfg);

/// The verification suite of a solved problem: interpolation, colligation and
/// Gram identities, certificate identity on variety samples, contractivity on
/// G_delta samples, nc axioms and the telescoping tail.  Adds "checks" to report.
bool run_checks(const PickProblem& problem, const SolveOutcome& out, const Realization& r, const RunConfig& cfg,
                Json& report);

/// Smallest t with W / t interpolable, to relative 1e-4 (0 when W = 0).
/// nullopt when no feasible t was found.
std::optional<double> minimal_norm(const AlgebraBasis& basis, const PolyMatrix& delta, const CMatrix& w,
                                   const RunConfig& cfg);

struct CommandResult {
  int exit_code = kExitInputError;
  Json report;
};

Json base_report(const std::string& command, const RunConfig& cfg);

CommandResult cmd_solve(const std::string& problem_path, const std::string& realization_out,
                        const std::string& certificate_out, const RunConfig& cfg);
/// sup: the norm of the data on the variety if known; otherwise the minimal norm is used.
CommandResult cmd_extend(const std::string& problem_path, std::optional<double> sup,
                         const std::string& realization_out, const RunConfig& cfg);
CommandResult cmd_eval(const std::string& realization_path, const std::string& point_path);
CommandResult cmd_verify(const std::string& problem_path, const std::string& realization_path, const RunConfig& cfg);
CommandResult cmd_parametrize(const std::string& problem_path, const std::string& parametrization_out,
                              const RunConfig& cfg);
/// Theta: a constant square matrix file, a realization file, or zero when both are empty.
CommandResult cmd_lft(const std::string& parametrization_path, const std::string& theta_matrix_path,
                      const std::string& theta_realization_path, const std::string& point_path);
/// kind: "gdelta" or "variety".
CommandResult cmd_sample(const std::string& problem_path, const std::string& kind, const std::string& dump_out,
                         const RunConfig& cfg);
CommandResult cmd_oracle_pick(const std::string& data_path);
CommandResult cmd_norm(const std::string& problem_path, const RunConfig& cfg);

}  // namespace freepick
