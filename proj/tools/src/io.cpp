#include "io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "riswie/errors.hpp"

namespace riswie::tool {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& what) {
  throw Error(ErrorCode::parse, path + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& token, double& value) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc{} && ptr == end;
}

// Non-blank lines with their 1-based line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rows(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::parse, path + ": cannot open file");
  }
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    rows.emplace_back(number, split_csv(line));
  }
  return rows;
}

}  // namespace

PointCloud read_cloud_csv(const std::string& path) {
  auto rows = read_rows(path);
  if (rows.empty()) {
    throw Error(ErrorCode::parse, path + ": no data rows");
  }

  std::size_t first = 0;
  double probe = 0.0;
  if (!parse_double(rows[0].second[0], probe)) first = 1;  // header row
  if (first >= rows.size()) {
    throw Error(ErrorCode::parse, path + ": no data rows after header");
  }

  const std::size_t cols = rows[first].second.size();
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size() - first),
                      static_cast<Eigen::Index>(cols));
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    if (cells.size() != cols) {
      fail(path, line_no,
           "expected " + std::to_string(cols) + " columns, got " +
               std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        fail(path, line_no, "not a number: '" + cells[c] + "'");
      }
      pts(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return PointCloud::from_points(std::move(pts), path);
}

std::string cloud_to_csv(const Eigen::MatrixXd& points) {
  std::string out;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(points(i, j));
    }
    out += '\n';
  }
  return out;
}

DistanceMatrix read_matrix_csv(const std::string& path) {
  auto rows = read_rows(path);
  if (rows.empty()) {
    throw Error(ErrorCode::parse, path + ": no data rows");
  }

  DistanceMatrix out;
  double probe = 0.0;
  const bool has_ids = !parse_double(rows[0].second[0], probe) ||
                       rows[0].second.size() != rows.size();
  std::size_t first = 0;
  std::size_t value_offset = 0;
  if (has_ids) {
    const auto& header = rows[0].second;
    out.ids.assign(header.begin() + 1, header.end());
    first = 1;
    value_offset = 1;
    if (out.ids.empty()) fail(path, rows[0].first, "header row has no ids");
  } else {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.ids.push_back(std::to_string(i + 1));
    }
  }

  const std::size_t m = out.ids.size();
  if (rows.size() - first != m) {
    throw Error(ErrorCode::parse,
                path + ": expected " + std::to_string(m) + " matrix rows, got " +
                    std::to_string(rows.size() - first));
  }
  out.values.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < m; ++r) {
    const auto& [line_no, cells] = rows[first + r];
    if (cells.size() != m + value_offset) {
      fail(path, line_no,
           "expected " + std::to_string(m + value_offset) + " columns, got " +
               std::to_string(cells.size()));
    }
    if (has_ids && cells[0] != out.ids[r]) {
      fail(path, line_no,
           "row id '" + cells[0] + "' does not match column id '" + out.ids[r] +
               "'");
    }
    for (std::size_t c = 0; c < m; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c + value_offset], v)) {
        fail(path, line_no, "not a number: '" + cells[c + value_offset] + "'");
      }
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double gap = std::abs(out.values(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(j)) -
                                  out.values(static_cast<Eigen::Index>(j),
                                             static_cast<Eigen::Index>(i)));
      if (gap > 1e-9) {
        throw Error(ErrorCode::parse,
                    path + ": matrix not symmetric at (" + out.ids[i] + ", " +
                        out.ids[j] + ")");
      }
    }
    if (std::abs(out.values(static_cast<Eigen::Index>(i),
                            static_cast<Eigen::Index>(i))) > 1e-9) {
      throw Error(ErrorCode::parse,
                  path + ": nonzero diagonal at id " + out.ids[i]);
    }
  }
  return out;
}

std::string matrix_to_csv(const DistanceMatrix& matrix) {
  std::string out = "id";
  for (const auto& id : matrix.ids) {
    out += ',';
    out += id;
  }
  out += '\n';
  for (Eigen::Index i = 0; i < matrix.values.rows(); ++i) {
    out += matrix.ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < matrix.values.cols(); ++j) {
      out += ',';
      out += format_double(matrix.values(i, j));
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> read_labels_csv(const std::string& path,
                                         const std::vector<std::string>& ids) {
  auto rows = read_rows(path);
  if (rows.empty()) {
    throw Error(ErrorCode::parse, path + ": no data rows");
  }

  const std::unordered_set<std::string> known(ids.begin(), ids.end());
  std::size_t first = 0;
  if (rows[0].second.size() == 2 && !known.count(rows[0].second[0])) {
    first = 1;  // header like "id,label"
    if (first >= rows.size()) {
      throw Error(ErrorCode::parse, path + ": no data rows after header");
    }
  }

  const std::size_t width = rows[first].second.size();
  if (width != 1 && width != 2) {
    fail(path, rows[first].first, "expected 1 (label) or 2 (id,label) columns");
  }
  for (std::size_t r = first; r < rows.size(); ++r) {
    if (rows[r].second.size() != width) {
      fail(path, rows[r].first, "inconsistent column count");
    }
  }
  if (rows.size() - first != ids.size()) {
    throw Error(ErrorCode::parse,
                path + ": expected " + std::to_string(ids.size()) +
                    " labels, got " + std::to_string(rows.size() - first));
  }

  std::vector<std::string> labels(ids.size());
  if (width == 1) {
    for (std::size_t r = first; r < rows.size(); ++r) {
      labels[r - first] = rows[r].second[0];
    }
    return labels;
  }

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
  std::vector<bool> seen(ids.size(), false);
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    const auto it = index.find(cells[0]);
    if (it == index.end()) {
      fail(path, line_no, "unknown id '" + cells[0] + "'");
    }
    if (seen[it->second]) {
      fail(path, line_no, "duplicate id '" + cells[0] + "'");
    }
    seen[it->second] = true;
    labels[it->second] = cells[1];
  }
  return labels;
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::parse, path + ": cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::parse, path + ": cannot open for writing");
  }
  out << text;
  if (!out) {
    throw Error(ErrorCode::parse, path + ": write failed");
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text(path, text);
  }
}

}  // namespace riswie::tool
