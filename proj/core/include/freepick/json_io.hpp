#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "freepick/nevanlinna.hpp"
#include "freepick/problem.hpp"
#include "freepick/sampler.hpp"

namespace freepick {

using Json = nlohmann::ordered_json;

// Matrices are row-major arrays of [re, im] pairs.
Json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols);
/// A square matrix whose size is inferred from the entry count.
CMatrix square_from_json(const Json& j);
Complex complex_from_json(const Json& j);

Json tuple_to_json(const MatrixTuple& x);
/// {"X": [matrix, ...]} or a bare array of matrices.
MatrixTuple tuple_from_json(const Json& j, int d);

Json delta_to_json(const PolyMatrix& delta);
PolyMatrix delta_from_json(const Json& j, int d);

Json problem_to_json(const PickProblem& p);
PickProblem problem_from_json(const Json& j);

/// A realization together with a positive output scale (1 unless rescaled).
struct StoredRealization {
  Realization r;
  double scale = 1.0;
};

Json realization_to_json(const Realization& r, double scale = 1.0);
StoredRealization realization_from_json(const Json& j);

Json certificate_to_json(const GramCertificate& c);
GramCertificate certificate_from_json(const Json& j);

Json parametrization_to_json(const NevanlinnaData& nd);
NevanlinnaData parametrization_from_json(const Json& j);

struct SampleRecord {
  MatrixTuple x;
  double delta_norm = 0.0;
  std::optional<double> p0_norm;
};

Json sample_dump_to_json(const std::vector<SampleRecord>& samples, std::uint64_t seed);

Json read_json_file(const std::string& path);
/// Writes j.dump(2) plus a trailing newline.
void write_json_file(const std::string& path, const Json& j);

}  // namespace freepick
