#pragma once

// Matrix text format: {"dim": n, "entries": [[[re, im], ...], ...]} row-major.
// Rectangular blocks (used by dilation data) are plain arrays of rows of
// [re, im] pairs.

#include <filesystem>

#include <json.hpp>

#include "annulus/operator_core.hpp"

namespace annulus {

using json = nlohmann::json;

/// Throws InputError naming the offending row/column.
Operator operator_from_json(const json& doc);
json operator_to_json(const Operator& op);

/// Rectangular matrix: either the {"dim", "entries"} form or a bare
/// array of rows.
Matrix matrix_from_json(const json& doc);
json matrix_to_json(const Matrix& m);

json complex_to_json(cplx z);
cplx complex_from_json(const json& v);

json read_json_file(const std::filesystem::path& path);
Operator read_operator_file(const std::filesystem::path& path);

}  // namespace annulus
