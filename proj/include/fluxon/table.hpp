#pragma once

// Result tables and their CSV/JSON serialisation, plus the SHA-256 manifest
// that accompanies every emitted file. Requires nlohmann_json and OpenSSL.

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fluxon/error.hpp"

namespace fluxon {

using ordered_json = nlohmann::ordered_json;

/// Rectangular numeric table with one optional error message per row.
struct SweepTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> errors;  ///< "" when the row succeeded
  ordered_json metadata = ordered_json::object();

  void add_row(std::vector<double> values, std::string error = {}) {
    if (values.size() != columns.size()) throw Error(ErrorKind::invalid_params, "row width does not match header");
    rows.push_back(std::move(values));
    errors.push_back(std::move(error));
  }

  std::size_t column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw Error(ErrorKind::invalid_params, "no column " + std::string(name));
    return static_cast<std::size_t>(it - columns.begin());
  }

  std::size_t failed_rows() const {
    return static_cast<std::size_t>(std::count_if(errors.begin(), errors.end(), [](const auto& e) { return !e.empty(); }));
  }

  bool operator==(const SweepTable& o) const {
    if (columns != o.columns || errors != o.errors || metadata != o.metadata || rows.size() != o.rows.size()) return false;
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        const double a = rows[r][c], b = o.rows[r][c];
        if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
      }
    return true;
  }
};

enum class Format { csv, json };

namespace detail {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::io, "not a number: '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

}  // namespace detail

/// Error text safe for a CSV cell: separators and line breaks become ';' / ' '.
inline std::string sanitize_cell(std::string s) {
  for (auto& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

/// CSV: '# key: <json>' metadata lines, header, one line per row; the last
/// column is the row error marker.
inline std::string to_csv(const SweepTable& t) {
  std::string out;
  for (const auto& [key, value] : t.metadata.items()) out += "# " + key + ": " + value.dump() + "\n";
  for (const auto& c : t.columns) out += c + ",";
  out += "error\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (double v : t.rows[r]) out += detail::format_number(v) + ",";
    out += sanitize_cell(t.errors[r]) + "\n";
  }
  return out;
}

inline SweepTable parse_csv(const std::string& text) {
  SweepTable t;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!header && line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) throw Error(ErrorKind::io, "line " + std::to_string(line_no) + ": bad metadata");
      t.metadata[line.substr(2, colon - 2)] = ordered_json::parse(line.substr(colon + 2));
      continue;
    }
    const auto cells = detail::split(line, ',');
    if (!header) {
      if (cells.empty() || cells.back() != "error")
        throw Error(ErrorKind::io, "line " + std::to_string(line_no) + ": header must end with 'error'");
      for (std::size_t i = 0; i + 1 < cells.size(); ++i) t.columns.emplace_back(cells[i]);
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size() + 1)
      throw Error(ErrorKind::io, "line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(t.columns.size() + 1) + " cells");
    std::vector<double> row;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) row.push_back(detail::parse_number(cells[i]));
    t.rows.push_back(std::move(row));
    t.errors.emplace_back(cells.back());
  }
  if (!header) throw Error(ErrorKind::io, "missing header line");
  return t;
}

/// JSON: {metadata, columns, rows}; NaN becomes null and the trailing "error"
/// column holds the row marker (null when the row succeeded).
inline std::string to_json_text(const SweepTable& t) {
  ordered_json j;
  j["metadata"] = t.metadata;
  ordered_json cols = t.columns;
  cols.push_back("error");
  j["columns"] = cols;
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ordered_json row = ordered_json::array();
    for (double v : t.rows[r]) row.push_back(std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr));
    row.push_back(t.errors[r].empty() ? ordered_json(nullptr) : ordered_json(t.errors[r]));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump(1) + "\n";
}

inline SweepTable parse_json_text(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  SweepTable t;
  t.metadata = j.at("metadata");
  const auto& cols = j.at("columns");
  if (cols.empty() || cols.back() != "error") throw Error(ErrorKind::io, "columns must end with 'error'");
  for (std::size_t i = 0; i + 1 < cols.size(); ++i) t.columns.push_back(cols[i].get<std::string>());
  for (const auto& row : j.at("rows")) {
    if (row.size() != cols.size()) throw Error(ErrorKind::io, "row width does not match columns");
    std::vector<double> values;
    for (std::size_t i = 0; i + 1 < row.size(); ++i)
      values.push_back(row[i].is_null() ? std::numeric_limits<double>::quiet_NaN() : row[i].get<double>());
    t.rows.push_back(std::move(values));
    t.errors.push_back(row.back().is_null() ? std::string{} : row.back().get<std::string>());
  }
  return t;
}

inline std::string serialize(const SweepTable& t, Format f) { return f == Format::csv ? to_csv(t) : to_json_text(t); }

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::io, "SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

/// Adds or replaces the entry for `file` in manifest.json next to it.
/// Entries are kept sorted by file name.
inline std::filesystem::path update_manifest(const std::filesystem::path& file, const std::string& content) {
  const auto manifest = (file.has_parent_path() ? file.parent_path() : std::filesystem::path(".")) / "manifest.json";
  ordered_json m = {{"files", ordered_json::array()}};
  if (std::filesystem::exists(manifest)) {
    try {
      m = ordered_json::parse(read_file(manifest));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::io, manifest.string() + ": " + e.what());
    }
  }
  auto& files = m["files"];
  const std::string name = file.filename().string();
  ordered_json kept = ordered_json::array();
  for (const auto& e : files)
    if (e.at("path") != name) kept.push_back(e);
  kept.push_back({{"path", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.at("path").template get<std::string>() < b.at("path").template get<std::string>();
  });
  files = std::move(kept);
  write_file(manifest, m.dump(1) + "\n");
  return manifest;
}

/// Writes the table and records it in the manifest.
inline void emit(const SweepTable& t, Format f, const std::filesystem::path& path) {
  const std::string content = serialize(t, f);
  write_file(path, content);
  update_manifest(path, content);
}

}  // namespace fluxon
