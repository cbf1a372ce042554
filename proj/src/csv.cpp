#include "kdim/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace kdim::csv {

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

int Table::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

[[noreturn]] void fail(size_t line, const std::string& what) {
  throw std::runtime_error("csv: line " + std::to_string(line) + ": " + what);
}

}  // namespace

Table parse(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;  // distinguishes "" line from empty-field line
  size_t line = 1;
  size_t record_line = 1;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (record.size() != 1 || !record[0].empty()) records.push_back(record);
    record.clear();
    record_line = line;
  };

  for (size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty()) fail(line, "quote inside unquoted field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        field_started = true;  // a separator implies a following field
        break;
      case '\r':
        break;  // tolerate CRLF input; output is always LF
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += ch;
        field_started = true;
    }
  }
  if (in_quotes) fail(record_line, "unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty()) fail(1, "missing header row");
  Table table;
  table.header = records.front();
  for (size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      fail(r + 1, "expected " + std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(records[r].size()));
    table.rows.push_back(records[r]);
  }
  return table;
}

std::string write_matrix(const Eigen::MatrixXd& mat, std::vector<std::string> header) {
  if (header.empty())
    for (Eigen::Index j = 0; j < mat.cols(); ++j) header.push_back("c" + std::to_string(j));
  if (static_cast<Eigen::Index>(header.size()) != mat.cols())
    throw std::invalid_argument("csv: header width does not match matrix columns");
  Table table;
  table.header = std::move(header);
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    std::vector<std::string> row;
    row.reserve(mat.cols());
    for (Eigen::Index j = 0; j < mat.cols(); ++j) row.push_back(format_double(mat(i, j)));
    table.rows.push_back(std::move(row));
  }
  return serialize(table);
}

Eigen::MatrixXd read_matrix(const std::string& text) {
  Table table = parse(text);
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(table.rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
  for (size_t i = 0; i < table.rows.size(); ++i) {
    for (size_t j = 0; j < table.rows[i].size(); ++j) {
      const std::string& cell = table.rows[i][j];
      size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        fail(i + 2, "not a number: '" + cell + "'");
      }
      if (used != cell.size()) fail(i + 2, "trailing characters in number: '" + cell + "'");
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
    }
  }
  return mat;
}

std::string serialize(const Table& table) {
  std::ostringstream out;
  auto write_row = [&](const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << quote(row[i]);
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
  return out.str();
}

}  // namespace kdim::csv
