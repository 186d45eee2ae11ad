#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "serkit/matrix.hpp"

namespace serkit {

// Shortest round-trip decimal representation (via std::to_chars), so files
// reload to bitwise-identical doubles and reruns are byte-reproducible.
std::string format_double(double v);

// Strict double parse; `where` names the file location for error messages.
double parse_double(std::string_view s, const std::string& where);

std::string read_file(const std::string& path);

// Writes to a sibling temp file then renames over the target, so readers
// never observe a half-written file.
void write_file_atomic(const std::string& path, const std::string& content);

// Splits comma-delimited text into rows of fields. The formats handled here
// never quote fields, so this is a plain split; trailing '\r' is stripped,
// fully blank lines are dropped.
std::vector<std::vector<std::string>> parse_delimited(const std::string& text);

std::vector<std::string> split(std::string_view line, char delim);

// Square matrix with class-name header row and column:
//   ,N,H,A,S
//   N,0,1,...
std::string matrix_to_csv(const Matrix& m, const std::vector<std::string>& labels);
std::string matrix_to_csv(const CoCountMatrix& m, const std::vector<std::string>& labels);

// {"classes": [...], "rows": R, "cols": C, "data": [row-major]}
std::string matrix_to_json(const Matrix& m, const std::vector<std::string>& labels);
std::string matrix_to_json(const CoCountMatrix& m, const std::vector<std::string>& labels);

// Inverse of the square matrix_to_csv form; row labels must repeat the
// header order. `labels` receives the header names.
Matrix square_matrix_from_csv(const std::string& text,
                              std::vector<std::string>& labels);

// Rectangular id + value table used for label and feature files.
struct ValueTable {
  std::vector<std::string> ids;
  std::vector<std::string> columns;  // header names after utterance_id
  Matrix values;                     // ids.size() x columns.size()
  std::map<std::string, std::string> meta;  // leading "# key=value ..." line
};

// Label file: optional "# " metadata line, then
//   utterance_id,<class>,...,<class>
// Feature files use the same shape with f1..fd columns.
std::string value_table_to_csv(const ValueTable& t);
ValueTable read_value_table(const std::string& path);

}  // namespace serkit
