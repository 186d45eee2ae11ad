#include "serkit/io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "serkit/errors.hpp"

namespace serkit {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw InputError(where + ": not a number: '" + std::string(s) + "'");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw InputError("read failed: " + path);
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write file: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw InputError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw InputError("rename failed for " + path + ": " + std::strerror(errno));
  }
}

std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::vector<std::string>> parse_delimited(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    bool last = end == std::string::npos;
    std::string_view line(text.data() + start,
                          (last ? text.size() : end) - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) rows.push_back(split(line, ','));
    if (last) break;
    start = end + 1;
  }
  return rows;
}

namespace {

template <typename M, typename Fmt>
std::string square_csv(const M& m, std::size_t n,
                       const std::vector<std::string>& labels, Fmt fmt) {
  if (labels.size() != n)
    throw InputError("matrix csv: label count does not match matrix size");
  std::string out;
  for (const auto& l : labels) {
    out += ',';
    out += l;
  }
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    out += labels[i];
    for (std::size_t j = 0; j < n; ++j) {
      out += ',';
      out += fmt(m.at(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string matrix_to_csv(const Matrix& m,
                          const std::vector<std::string>& labels) {
  if (m.rows() != m.cols())
    throw InputError("matrix csv: labeled form requires a square matrix");
  return square_csv(m, m.rows(), labels,
                    [](double v) { return format_double(v); });
}

std::string matrix_to_csv(const CoCountMatrix& m,
                          const std::vector<std::string>& labels) {
  return square_csv(m, m.size(), labels,
                    [](std::int64_t v) { return std::to_string(v); });
}

Matrix square_matrix_from_csv(const std::string& text,
                              std::vector<std::string>& labels) {
  auto rows = parse_delimited(text);
  if (rows.empty() || rows[0].size() < 2 || !rows[0][0].empty())
    throw InputError("matrix csv: expected a leading ',label,...' header");
  labels.assign(rows[0].begin() + 1, rows[0].end());
  std::size_t n = labels.size();
  if (rows.size() != n + 1)
    throw InputError("matrix csv: " + std::to_string(n) + " labels but " +
                     std::to_string(rows.size() - 1) + " data rows");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    if (row.size() != n + 1 || row[0] != labels[i])
      throw InputError("matrix csv: row " + std::to_string(i + 1) +
                       " does not match the header order");
    for (std::size_t j = 0; j < n; ++j)
      m.at(i, j) = parse_double(row[j + 1],
                                "matrix csv row " + std::to_string(i + 1));
  }
  return m;
}

std::string matrix_to_json(const Matrix& m,
                           const std::vector<std::string>& labels) {
  nlohmann::json j;
  j["classes"] = labels;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = m.data();
  return j.dump(2) + "\n";
}

std::string matrix_to_json(const CoCountMatrix& m,
                           const std::vector<std::string>& labels) {
  nlohmann::json j;
  j["classes"] = labels;
  j["rows"] = m.size();
  j["cols"] = m.size();
  j["data"] = m.data();
  return j.dump(2) + "\n";
}

std::string value_table_to_csv(const ValueTable& t) {
  if (t.values.rows() != t.ids.size() || t.values.cols() != t.columns.size())
    throw InputError("value table: shape mismatch between ids/columns/values");
  std::string out;
  if (!t.meta.empty()) {
    out += "#";
    for (const auto& [k, v] : t.meta) {
      out += ' ';
      out += k;
      out += '=';
      out += v;
    }
    out += '\n';
  }
  out += "utterance_id";
  for (const auto& c : t.columns) {
    out += ',';
    out += c;
  }
  out += '\n';
  for (std::size_t i = 0; i < t.ids.size(); ++i) {
    out += t.ids[i];
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      out += ',';
      out += format_double(t.values.at(i, j));
    }
    out += '\n';
  }
  return out;
}

ValueTable read_value_table(const std::string& path) {
  std::string text = read_file(path);
  ValueTable t;
  std::size_t start = 0;
  // Leading metadata line: "# k=v k=v ...".
  if (!text.empty() && text[0] == '#') {
    std::size_t end = text.find('\n');
    std::string_view line(text.data(),
                          end == std::string::npos ? text.size() : end);
    std::istringstream ss{std::string(line.substr(1))};
    std::string tok;
    while (ss >> tok) {
      std::size_t eq = tok.find('=');
      if (eq != std::string::npos)
        t.meta[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    start = end == std::string::npos ? text.size() : end + 1;
  }
  auto rows = parse_delimited(text.substr(start));
  if (rows.empty()) throw InputError(path + ": empty table");
  const auto& header = rows[0];
  if (header.size() < 2 || header[0] != "utterance_id")
    throw InputError(path + ": expected header 'utterance_id,<col>,...'");
  t.columns.assign(header.begin() + 1, header.end());
  std::size_t ncols = t.columns.size();
  t.values = Matrix(rows.size() - 1, ncols);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw InputError(path + " row " + std::to_string(r + 1) +
                       ": expected " + std::to_string(header.size()) +
                       " fields, got " + std::to_string(rows[r].size()));
    t.ids.push_back(rows[r][0]);
    for (std::size_t j = 0; j < ncols; ++j)
      t.values.at(r - 1, j) = parse_double(
          rows[r][j + 1], path + " row " + std::to_string(r + 1));
  }
  return t;
}

}  // namespace serkit
