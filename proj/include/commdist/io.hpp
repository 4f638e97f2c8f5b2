#pragma once

// Matrix files and JSON renderings of reports, shared by the CLI and tests.
//
// Matrix file formats:
//   JSON  a 3×3 nested array, {"matrix": <3×3 nested array>}, or a flat
//         array of the six coefficients a11, a22, a33, a12, a13, a23;
//   CSV   one row of the same six coefficients, optionally preceded by the
//         header `a11,a22,a33,a12,a13,a23`; `#` lines are comments.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "commdist/linalg3.hpp"
#include "commdist/semimetrics.hpp"

namespace commdist {

/// Throws SchemaError (shape, non-numbers, asymmetry beyond 1e-12·‖A‖).
SymMat3 parse_matrix_json(std::string_view text);
SymMat3 parse_matrix_csv(std::string_view text);
/// Format from the extension: .json → JSON, anything else → CSV.
SymMat3 load_matrix(const std::filesystem::path& path);

nlohmann::json to_json(const Vec3& v);
nlohmann::json to_json(const Mat3& m);
nlohmann::json to_json(const DistanceReport& r);
DistanceReport distance_report_from_json(const nlohmann::json& j);

}  // namespace commdist
