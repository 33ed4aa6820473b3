#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fslhd/level_matrix.hpp"
#include "fslhd/matrix.hpp"
#include "fslhd/rng.hpp"
#include "fslhd/slice_spec.hpp"

namespace fslhd {

enum class MoveKind { within_slice, different_slice, out_slice };

/// One structure-preserving exchange in a single column. Within- and
/// different-slice moves swap the values of two rows; out-slice moves
/// replace one value with a level the column does not use.
struct ExchangeMove {
  MoveKind kind = MoveKind::within_slice;
  int column = 0;
  int row_a = 0;
  int row_b = 0;  // 0 for out-slice moves
  int old_a = 0;
  int new_a = 0;
  int old_b = 0;  // unused for out-slice moves
  int new_b = 0;
  int slice_a = 0;
  int slice_b = 0;  // 0 for out-slice moves
};

inline void apply_move(LevelMatrix& m, const ExchangeMove& mv) {
  if (m.levels(mv.row_a, mv.column) != mv.old_a ||
      (mv.kind != MoveKind::out_slice && m.levels(mv.row_b, mv.column) != mv.old_b))
    throw std::logic_error("apply_move: move does not match the matrix");
  m.levels(mv.row_a, mv.column) = mv.new_a;
  if (mv.kind != MoveKind::out_slice) m.levels(mv.row_b, mv.column) = mv.new_b;
}

inline void revert_move(LevelMatrix& m, const ExchangeMove& mv) {
  if (m.levels(mv.row_a, mv.column) != mv.new_a ||
      (mv.kind != MoveKind::out_slice && m.levels(mv.row_b, mv.column) != mv.new_b))
    throw std::logic_error("revert_move: move does not match the matrix");
  m.levels(mv.row_a, mv.column) = mv.old_a;
  if (mv.kind != MoveKind::out_slice) m.levels(mv.row_b, mv.column) = mv.old_b;
}

/// Admissible exchange partners of one element: rho holds levels of later
/// slices (swap partners), sigma holds unused levels (replacements).
/// Both sorted ascending.
struct TauSet {
  std::vector<int> rho;
  std::vector<int> sigma;
};

namespace detail {

inline std::vector<int> copy_column(const LevelMatrix& m, int column) {
  std::vector<int> col(static_cast<std::size_t>(m.spec.total_runs()));
  for (int r = 1; r <= m.spec.total_runs(); ++r)
    col[static_cast<std::size_t>(r - 1)] = m.levels(r, column);
  return col;
}

inline int find_in_column(const std::vector<int>& col, int level) {
  for (std::size_t i = 0; i < col.size(); ++i)
    if (col[i] == level) return static_cast<int>(i) + 1;
  return 0;
}

}  // namespace detail

/// Candidate set of element b in the given slice and column.
///
/// Every level of b's slice-scale bin other than b is classified: levels
/// present in a later slice of the column are swap candidates, levels absent
/// from the column are replacement candidates, and either kind is kept only
/// if the hypothetical exchange leaves the whole column structurally valid.
/// Levels sitting in the same or an earlier slice are never candidates (an
/// exchange with an earlier slice belongs to that slice's own neighborhood).
inline TauSet tau_candidates(const LevelMatrix& m, int slice, int column, int b) {
  const SliceSpec& spec = m.spec;
  std::vector<int> col = detail::copy_column(m, column);
  int b_row = 0;
  for (int r = spec.slice_begin(slice); r <= spec.slice_end(slice); ++r)
    if (col[static_cast<std::size_t>(r - 1)] == b) {
      b_row = r;
      break;
    }
  if (b_row == 0)
    throw std::invalid_argument("tau_candidates: element not found in the stated slice/column");

  const int ti = spec.slice_scale(slice);
  const int bin = static_cast<int>(ceil_div(b, ti));
  const int lo = (bin - 1) * ti + 1;
  const int hi = bin * ti;
  TauSet tau;
  for (int cand = lo; cand <= hi; ++cand) {
    if (cand == b) continue;
    const int at = detail::find_in_column(col, cand);
    if (at != 0) {
      if (at <= spec.slice_end(slice)) continue;  // same or earlier slice
      std::swap(col[static_cast<std::size_t>(b_row - 1)], col[static_cast<std::size_t>(at - 1)]);
      if (column_has_sliced_structure(spec, col)) tau.rho.push_back(cand);
      std::swap(col[static_cast<std::size_t>(b_row - 1)], col[static_cast<std::size_t>(at - 1)]);
    } else {
      col[static_cast<std::size_t>(b_row - 1)] = cand;
      if (column_has_sliced_structure(spec, col)) tau.sigma.push_back(cand);
      col[static_cast<std::size_t>(b_row - 1)] = b;
    }
  }
  return tau;
}

namespace detail {

constexpr int kAttemptsPerColumn = 10;  // retry budget is 10*q random draws

inline int pick_column(const LevelMatrix& m, std::mt19937_64& rng, int fixed_column) {
  if (fixed_column != 0) {
    if (fixed_column < 1 || fixed_column > m.spec.factors())
      throw std::invalid_argument("neighbor generation: column out of range");
    return fixed_column;
  }
  return 1 + uniform_index(rng, m.spec.factors());
}

}  // namespace detail

/// Uniformly random swap of two distinct rows inside a slice of one column.
/// column == 0 draws the column at random. Returns nothing when the slice
/// has fewer than two runs.
inline std::optional<ExchangeMove> within_slice_neighbor(const LevelMatrix& m, int slice,
                                                         std::mt19937_64& rng, int column = 0) {
  const SliceSpec& spec = m.spec;
  const int ni = spec.size(slice);
  if (ni < 2) return std::nullopt;
  const int col = detail::pick_column(m, rng, column);
  const int base = spec.slice_begin(slice);
  const int a = base + uniform_index(rng, ni);
  int b = base + uniform_index(rng, ni - 1);
  if (b >= a) ++b;
  ExchangeMove mv;
  mv.kind = MoveKind::within_slice;
  mv.column = col;
  mv.row_a = std::min(a, b);
  mv.row_b = std::max(a, b);
  mv.old_a = m.levels(mv.row_a, col);
  mv.old_b = m.levels(mv.row_b, col);
  mv.new_a = mv.old_b;
  mv.new_b = mv.old_a;
  mv.slice_a = slice;
  mv.slice_b = slice;
  return mv;
}

/// Random swap of an element of `slice` with an admissible element of a
/// later slice. Retries random (column, element) draws up to the attempt
/// budget; returns nothing when no candidate turns up.
inline std::optional<ExchangeMove> different_slice_neighbor(const LevelMatrix& m, int slice,
                                                            std::mt19937_64& rng, int column = 0) {
  const SliceSpec& spec = m.spec;
  if (slice >= spec.slice_count())
    throw std::invalid_argument("different_slice_neighbor: requires a slice before the last");
  const int attempts = detail::kAttemptsPerColumn * spec.factors();
  for (int a = 0; a < attempts; ++a) {
    const int col = detail::pick_column(m, rng, column);
    const int row = spec.slice_begin(slice) + uniform_index(rng, spec.size(slice));
    const int b = m.levels(row, col);
    const TauSet tau = tau_candidates(m, slice, col, b);
    if (tau.rho.empty()) continue;
    const int c = tau.rho[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(tau.rho.size())))];
    const std::vector<int> colv = detail::copy_column(m, col);
    const int partner_row = detail::find_in_column(colv, c);
    ExchangeMove mv;
    mv.kind = MoveKind::different_slice;
    mv.column = col;
    mv.row_a = row;
    mv.row_b = partner_row;
    mv.old_a = b;
    mv.new_a = c;
    mv.old_b = c;
    mv.new_b = b;
    mv.slice_a = slice;
    mv.slice_b = slice_of_row(spec, partner_row);
    return mv;
  }
  return std::nullopt;
}

/// Random replacement of an element of `slice` by an unused level of its
/// bin. Same retry budget and no-move signal as different_slice_neighbor.
inline std::optional<ExchangeMove> out_slice_neighbor(const LevelMatrix& m, int slice,
                                                      std::mt19937_64& rng, int column = 0) {
  const SliceSpec& spec = m.spec;
  const int attempts = detail::kAttemptsPerColumn * spec.factors();
  for (int a = 0; a < attempts; ++a) {
    const int col = detail::pick_column(m, rng, column);
    const int row = spec.slice_begin(slice) + uniform_index(rng, spec.size(slice));
    const int b = m.levels(row, col);
    const TauSet tau = tau_candidates(m, slice, col, b);
    if (tau.sigma.empty()) continue;
    const int c =
        tau.sigma[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(tau.sigma.size())))];
    ExchangeMove mv;
    mv.kind = MoveKind::out_slice;
    mv.column = col;
    mv.row_a = row;
    mv.old_a = b;
    mv.new_a = c;
    mv.slice_a = slice;
    return mv;
  }
  return std::nullopt;
}

struct NeighborCounts {
  long long n_in_slice = 0;
  long long n_diff_slice = 0;
  long long n_out_slice = 0;
};

/// Exhaustive neighbor counts for one slice: all within-slice pairs per
/// column, plus the candidate-set sizes of every element of the slice.
inline NeighborCounts count_neighbors(const LevelMatrix& m, int slice) {
  const SliceSpec& spec = m.spec;
  NeighborCounts counts;
  const long long ni = spec.size(slice);
  counts.n_in_slice = static_cast<long long>(spec.factors()) * ni * (ni - 1) / 2;
  for (int col = 1; col <= spec.factors(); ++col)
    for (int r = spec.slice_begin(slice); r <= spec.slice_end(slice); ++r) {
      const TauSet tau = tau_candidates(m, slice, col, m.levels(r, col));
      counts.n_diff_slice += static_cast<long long>(tau.rho.size());
      counts.n_out_slice += static_cast<long long>(tau.sigma.size());
    }
  return counts;
}

}  // namespace fslhd
