#pragma once

// Small CSV layer shared by the serializers and the CLI. Dialect: comma
// separator, '.' decimal point, LF line endings, mandatory header row.
// Fields containing a comma, quote, or newline are double-quoted with
// embedded quotes doubled.

#include <Eigen/Core>
#include <string>
#include <vector>

namespace kdim::csv {

// Shortest round-trip-safe decimal form of a double.
std::string format_double(double value);

// Quotes a field if (and only if) the dialect requires it.
std::string quote(const std::string& field);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // excludes the header

  int column(const std::string& name) const;  // -1 when absent
};

// Parses CSV text. Throws std::runtime_error naming the 1-based line on
// ragged rows, unterminated quotes, or a missing header.
Table parse(const std::string& text);

std::string serialize(const Table& table);

// Numeric matrix, one CSV row per matrix row. write_matrix emits the header
// c0..c{cols-1} unless one is supplied; read_matrix requires a header and
// throws with the offending line on non-numeric fields.
std::string write_matrix(const Eigen::MatrixXd& mat, std::vector<std::string> header = {});
Eigen::MatrixXd read_matrix(const std::string& text);

}  // namespace kdim::csv
