#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fslhd/matrix.hpp"
#include "fslhd/rng.hpp"
#include "fslhd/slice_spec.hpp"

namespace fslhd {

/// Integer level matrix underlying a sliced design. Entries live in
/// {1, ..., L}; freshly constructed matrices hold only multiples of t', but
/// out-slice exchanges may introduce any level of the touched bin, so the
/// binding invariants are the two sliced-uniformity conditions checked by
/// validate_sliced_structure.
struct LevelMatrix {
  SliceSpec spec;
  IntMat levels;  // n x q

  LevelMatrix(SliceSpec s, IntMat m) : spec(std::move(s)), levels(std::move(m)) {
    if (levels.rows() != spec.total_runs() || levels.cols() != spec.factors())
      throw std::invalid_argument("LevelMatrix: shape does not match spec");
  }
};

enum class JitterMode { midpoint, uniform };

/// Real-valued design in (0,1]^q with slice boundaries carried by the spec.
struct DesignMatrix {
  SliceSpec spec;
  RealMat points;  // n x q
  JitterMode jitter = JitterMode::midpoint;

  DesignMatrix(SliceSpec s, RealMat p, JitterMode j)
      : spec(std::move(s)), points(std::move(p)), jitter(j) {
    if (points.rows() != spec.total_runs() || points.cols() != spec.factors())
      throw std::invalid_argument("DesignMatrix: shape does not match spec");
  }
};

/// Checks one column of levels against both sliced-uniformity conditions:
/// scaled by t' the column must occupy every whole-design bin exactly once,
/// and scaled by t_i each slice must occupy every slice bin exactly once.
inline bool column_has_sliced_structure(const SliceSpec& spec, const std::vector<int>& column) {
  const int n = spec.total_runs();
  if (static_cast<int>(column.size()) != n)
    throw std::invalid_argument("column_has_sliced_structure: wrong column length");
  const int tp = spec.whole_scale();
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  for (int r = 0; r < n; ++r) {
    const int lvl = column[static_cast<std::size_t>(r)];
    if (lvl < 1 || lvl > spec.level_count()) return false;
    const int bin = static_cast<int>(ceil_div(lvl, tp));
    if (bin < 1 || bin > n || seen[static_cast<std::size_t>(bin)]) return false;
    seen[static_cast<std::size_t>(bin)] = 1;
  }
  for (int i = 1; i <= spec.slice_count(); ++i) {
    const int ni = spec.size(i);
    const int ti = spec.slice_scale(i);
    std::vector<char> slice_seen(static_cast<std::size_t>(ni) + 1, 0);
    for (int r = spec.slice_begin(i); r <= spec.slice_end(i); ++r) {
      const int bin = static_cast<int>(ceil_div(column[static_cast<std::size_t>(r - 1)], ti));
      if (bin < 1 || bin > ni || slice_seen[static_cast<std::size_t>(bin)]) return false;
      slice_seen[static_cast<std::size_t>(bin)] = 1;
    }
  }
  return true;
}

/// True iff every column satisfies both sliced-uniformity conditions.
/// Pure; never mutates the matrix.
inline bool validate_sliced_structure(const LevelMatrix& m) {
  const int n = m.spec.total_runs();
  std::vector<int> column(static_cast<std::size_t>(n));
  for (int c = 1; c <= m.spec.factors(); ++c) {
    for (int r = 1; r <= n; ++r) column[static_cast<std::size_t>(r - 1)] = m.levels(r, c);
    if (!column_has_sliced_structure(m.spec, column)) return false;
  }
  return true;
}

/// Maps levels to points: x = (level - eps) / L, with eps = 1/2 in midpoint
/// mode and eps ~ U(0,1) per entry in uniform mode. Criterion evaluation
/// always runs on midpoint designs; uniform jitter is for final export.
inline DesignMatrix to_design(const LevelMatrix& m, JitterMode mode, std::uint64_t seed = 0) {
  const int n = m.spec.total_runs();
  const int q = m.spec.factors();
  const double L = static_cast<double>(m.spec.level_count());
  RealMat pts(n, q);
  if (mode == JitterMode::midpoint) {
    for (int r = 1; r <= n; ++r)
      for (int c = 1; c <= q; ++c) pts(r, c) = (m.levels(r, c) - 0.5) / L;
  } else {
    std::mt19937_64 rng = make_stream(seed, 0x6a69747465724d64ULL);
    for (int r = 1; r <= n; ++r)
      for (int c = 1; c <= q; ++c) pts(r, c) = (m.levels(r, c) - uniform_real01(rng)) / L;
  }
  return DesignMatrix(m.spec, std::move(pts), mode);
}

/// Result of checking a real-valued design against the interval-occupancy
/// conditions. slice == 0 marks a whole-design violation.
struct StructureReport {
  bool ok = true;
  int slice = 0;
  int column = 0;
  std::string message;
};

/// Verifies that every column has exactly one point per whole-design
/// interval ((k-1)/n, k/n] and, per slice, one point per ((k-1)/n_i, k/n_i].
inline StructureReport check_design_structure(const DesignMatrix& d) {
  const SliceSpec& spec = d.spec;
  const int n = spec.total_runs();
  auto fail = [](int slice, int column) {
    StructureReport r;
    r.ok = false;
    r.slice = slice;
    r.column = column;
    r.message = (slice == 0 ? "whole design, column " : "slice " + std::to_string(slice) + ", column ") +
                std::to_string(column);
    return r;
  };
  for (int c = 1; c <= spec.factors(); ++c) {
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    for (int r = 1; r <= n; ++r) {
      const double x = d.points(r, c);
      if (!(x > 0.0 && x <= 1.0)) return fail(0, c);
      const int bin = static_cast<int>(std::ceil(x * n));
      if (bin < 1 || bin > n || seen[static_cast<std::size_t>(bin)]) return fail(0, c);
      seen[static_cast<std::size_t>(bin)] = 1;
    }
    for (int i = 1; i <= spec.slice_count(); ++i) {
      const int ni = spec.size(i);
      std::vector<char> slice_seen(static_cast<std::size_t>(ni) + 1, 0);
      for (int r = spec.slice_begin(i); r <= spec.slice_end(i); ++r) {
        const int bin = static_cast<int>(std::ceil(d.points(r, c) * ni));
        if (bin < 1 || bin > ni || slice_seen[static_cast<std::size_t>(bin)]) return fail(i, c);
        slice_seen[static_cast<std::size_t>(bin)] = 1;
      }
    }
  }
  return StructureReport{};
}

}  // namespace fslhd
