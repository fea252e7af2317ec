#include "annulus/matrix_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "annulus/errors.hpp"

namespace annulus {
namespace {

[[noreturn]] void fail_at(std::size_t row, std::size_t col, const std::string& msg) {
  std::ostringstream os;
  os << "matrix entry at row " << row << ", column " << col << ": " << msg;
  throw InputError(os.str());
}

cplx parse_entry(const json& v, std::size_t row, std::size_t col) {
  if (!v.is_array() || v.size() != 2) fail_at(row, col, "expected [re, im]");
  if (!v[0].is_number() || !v[1].is_number()) fail_at(row, col, "components must be numbers");
  const double re = v[0].get<double>();
  const double im = v[1].get<double>();
  if (!std::isfinite(re) || !std::isfinite(im)) fail_at(row, col, "non-finite value");
  return {re, im};
}

Matrix parse_rows(const json& rows, long expected_rows, long expected_cols) {
  if (!rows.is_array()) throw InputError("\"entries\" must be an array of rows");
  const auto nrows = static_cast<long>(rows.size());
  if (expected_rows >= 0 && nrows != expected_rows) {
    std::ostringstream os;
    os << "expected " << expected_rows << " rows, found " << nrows;
    throw InputError(os.str());
  }
  if (nrows == 0) throw InputError("matrix has no rows");
  long ncols = expected_cols;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array()) {
      std::ostringstream os;
      os << "row " << i << " is not an array";
      throw InputError(os.str());
    }
    const auto len = static_cast<long>(rows[i].size());
    if (ncols < 0) ncols = len;
    if (len != ncols) {
      std::ostringstream os;
      os << "row " << i << " has " << len << " entries, expected " << ncols;
      throw InputError(os.str());
    }
  }
  Matrix m(nrows, ncols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_entry(rows[i][j], i, j);
    }
  }
  return m;
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& v) { return parse_entry(v, 0, 0); }

Operator operator_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("entries")) {
    throw InputError("matrix document must be an object with \"dim\" and \"entries\"");
  }
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long>() <= 0) {
    throw InputError("\"dim\" must be a positive integer");
  }
  const long n = doc["dim"].get<long>();
  return Operator(parse_rows(doc["entries"], n, n));
}

json operator_to_json(const Operator& op) {
  json doc;
  doc["dim"] = op.dim();
  doc["entries"] = matrix_to_json(op.matrix());
  return doc;
}

Matrix matrix_from_json(const json& doc) {
  if (doc.is_object()) {
    if (!doc.contains("entries")) throw InputError("matrix object lacks \"entries\"");
    return parse_rows(doc["entries"], -1, -1);
  }
  return parse_rows(doc, -1, -1);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Operator read_operator_file(const std::filesystem::path& path) {
  return operator_from_json(read_json_file(path));
}

}  // namespace annulus
