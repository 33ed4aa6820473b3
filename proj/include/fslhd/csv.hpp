#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fslhd/level_matrix.hpp"
#include "fslhd/slice_spec.hpp"

namespace fslhd {

namespace detail {

/// Coordinates are serialized with 12 significant digits; that is enough for
/// parse -> re-serialize to be byte-stable.
inline std::string format_coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace detail

/// Design CSV: header `slice,x1,...,xq`, rows in slice-major order,
/// 1-based slice labels, coordinates with 12 significant digits.
inline void write_design_csv(std::ostream& os, const DesignMatrix& d) {
  os << "slice";
  for (int c = 1; c <= d.spec.factors(); ++c) os << ",x" << c;
  os << "\n";
  for (int r = 1; r <= d.spec.total_runs(); ++r) {
    os << slice_of_row(d.spec, r);
    for (int c = 1; c <= d.spec.factors(); ++c) os << "," << detail::format_coord(d.points(r, c));
    os << "\n";
  }
}

/// Levels CSV: header `slice,m1,...,mq`, integer levels.
inline void write_levels_csv(std::ostream& os, const LevelMatrix& m) {
  os << "slice";
  for (int c = 1; c <= m.spec.factors(); ++c) os << ",m" << c;
  os << "\n";
  for (int r = 1; r <= m.spec.total_runs(); ++r) {
    os << slice_of_row(m.spec, r);
    for (int c = 1; c <= m.spec.factors(); ++c) os << "," << m.levels(r, c);
    os << "\n";
  }
}

/// Parses a design CSV written by write_design_csv. Slice labels must form
/// contiguous ascending 1-based blocks; the slice run sizes are derived from
/// them. Throws std::runtime_error with a line reference on malformed input.
inline DesignMatrix read_design_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("design CSV: empty input");
  const std::vector<std::string> header = detail::split_csv_line(line);
  if (header.size() < 2 || header[0] != "slice")
    throw std::runtime_error("design CSV: header must be slice,x1,...,xq");
  const int q = static_cast<int>(header.size()) - 1;
  for (int c = 1; c <= q; ++c)
    if (header[static_cast<std::size_t>(c)] != "x" + std::to_string(c))
      throw std::runtime_error("design CSV: unexpected column name '" +
                               header[static_cast<std::size_t>(c)] + "'");

  std::vector<int> slice_ids;
  std::vector<double> coords;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (static_cast<int>(fields.size()) != q + 1)
      throw std::runtime_error("design CSV: line " + std::to_string(line_no) +
                               ": expected " + std::to_string(q + 1) + " fields");
    try {
      slice_ids.push_back(std::stoi(fields[0]));
      for (int c = 1; c <= q; ++c) coords.push_back(std::stod(fields[static_cast<std::size_t>(c)]));
    } catch (const std::exception&) {
      throw std::runtime_error("design CSV: line " + std::to_string(line_no) + ": bad number");
    }
  }
  if (slice_ids.empty()) throw std::runtime_error("design CSV: no data rows");

  std::vector<int> sizes;
  int current = 0;
  for (int id : slice_ids) {
    if (id == current) {
      ++sizes.back();
    } else if (id == current + 1) {
      sizes.push_back(1);
      current = id;
    } else {
      throw std::runtime_error("design CSV: slice labels must be contiguous ascending blocks");
    }
  }

  SliceSpec spec(sizes, q);
  RealMat pts(spec.total_runs(), q);
  for (int r = 1; r <= spec.total_runs(); ++r)
    for (int c = 1; c <= q; ++c)
      pts(r, c) = coords[static_cast<std::size_t>(r - 1) * q + (c - 1)];
  return DesignMatrix(std::move(spec), std::move(pts), JitterMode::midpoint);
}

}  // namespace fslhd
