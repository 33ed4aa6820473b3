#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fslhd/evaluator.hpp"
#include "fslhd/level_matrix.hpp"
#include "fslhd/matrix.hpp"
#include "fslhd/neighborhood.hpp"
#include "fslhd/rng.hpp"

namespace fslhd {

/// Number of unordered pairs of identical rows.
inline long long repeating_count(const IntMat& a) {
  long long pairs = 0;
  for (int i = 1; i < a.rows(); ++i)
    for (int j = i + 1; j <= a.rows(); ++j) {
      bool same = true;
      for (int k = 1; k <= a.cols(); ++k)
        if (a(i, k) != a(j, k)) {
          same = false;
          break;
        }
      if (same) ++pairs;
    }
  return pairs;
}

/// Projection of the level matrix onto the coarse grid of one slice scale:
/// entry -> ceil(entry / t_i), values in {1, ..., n_i}.
inline IntMat grid_projection(const LevelMatrix& m, int slice) {
  const int ti = m.spec.slice_scale(slice);
  IntMat out(m.levels.rows(), m.levels.cols());
  for (int r = 1; r <= m.levels.rows(); ++r)
    for (int c = 1; c <= m.levels.cols(); ++c)
      out(r, c) = static_cast<int>(ceil_div(m.levels(r, c), ti));
  return out;
}

namespace detail {

/// base^exp > threshold, with early exit so the product cannot overflow.
inline bool power_exceeds(long long base, int exp, long long threshold) {
  long long acc = 1;
  for (int e = 0; e < exp; ++e) {
    acc *= base;
    if (acc > threshold) return true;
  }
  return acc > threshold;
}

inline std::vector<int> rows_in_repeats(const IntMat& a) {
  std::vector<char> repeated(static_cast<std::size_t>(a.rows()) + 1, 0);
  for (int i = 1; i < a.rows(); ++i)
    for (int j = i + 1; j <= a.rows(); ++j) {
      bool same = true;
      for (int k = 1; k <= a.cols(); ++k)
        if (a(i, k) != a(j, k)) {
          same = false;
          break;
        }
      if (same) {
        repeated[static_cast<std::size_t>(i)] = 1;
        repeated[static_cast<std::size_t>(j)] = 1;
      }
    }
  std::vector<int> rows;
  for (int r = 1; r <= a.rows(); ++r)
    if (repeated[static_cast<std::size_t>(r)]) rows.push_back(r);
  return rows;
}

/// Slice processing order: ascending run size, stable on ties. The stored
/// design is never reordered.
inline std::vector<int> ascending_size_order(const SliceSpec& spec) {
  std::vector<int> order(static_cast<std::size_t>(spec.slice_count()));
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return spec.size(a) < spec.size(b); });
  return order;
}

}  // namespace detail

namespace detail {

inline void check_structure_after_accept(const LevelMatrix& m, const char* where) {
  if (!validate_sliced_structure(m))
    throw std::logic_error(std::string(where) + ": accepted exchange broke the sliced structure");
}

}  // namespace detail

struct TwoPartParams {
  int budget_per_slice = 100;    // proposals per slice per part
  int dedup_safety_factor = 10;  // de-duplication may use this many extra budgets
  std::uint64_t seed = 0;

  void validate() const {
    if (budget_per_slice < 0) throw std::invalid_argument("TwoPartParams: negative budget");
    if (dedup_safety_factor < 1)
      throw std::invalid_argument("TwoPartParams: dedup_safety_factor must be >= 1");
  }
};

struct TwoPartResult {
  LevelMatrix matrix;
  std::vector<char> repeat_free;  // per slice: coarse projection has no repeats
  bool dedup_warning = false;     // a de-duplication phase hit its safety budget
  CriterionValue initial;
  CriterionValue final_value;
};

/// Part I: per slice (ascending run size), first kill repeating coarse-grid
/// rows via within-slice swaps accepted only when the repeat count strictly
/// drops, then greedily improve the criterion with within-slice swaps that
/// keep every already repeat-free applicable scale repeat free. Slices whose
/// grid has no more cells than runs (n_i^q <= n) skip the de-duplication.
inline TwoPartResult part1(const LevelMatrix& m0, const CriterionConfig& cfg,
                           const TwoPartParams& params) {
  params.validate();
  const SliceSpec& spec = m0.spec;
  std::mt19937_64 rng(splitmix64(params.seed ^ 0x7061727431ULL));
  LevelMatrix work = m0;
  CsmEvaluator eval(work, cfg);
  TwoPartResult out{work, std::vector<char>(static_cast<std::size_t>(spec.slice_count()), 0),
                    false, eval.current(), eval.current()};
  std::vector<char> locked(static_cast<std::size_t>(spec.slice_count() + 1), 0);

  auto locked_scales_stay_clean = [&](const ExchangeMove& mv) {
    apply_move(work, mv);
    bool ok = true;
    for (int e = 1; e <= spec.slice_count(); ++e)
      if (locked[static_cast<std::size_t>(e)] && repeating_count(grid_projection(work, e)) > 0) {
        ok = false;
        break;
      }
    revert_move(work, mv);
    return ok;
  };

  for (int slice : detail::ascending_size_order(spec)) {
    const bool applicable = detail::power_exceeds(spec.size(slice), spec.factors(), spec.total_runs());
    if (applicable) {
      const long long cap =
          static_cast<long long>(params.dedup_safety_factor) * params.budget_per_slice;
      long long attempts = 0;
      long long repeats = repeating_count(grid_projection(work, slice));
      while (repeats > 0 && attempts < cap) {
        ++attempts;
        const std::vector<int> rows = detail::rows_in_repeats(grid_projection(work, slice));
        const int row_a = rows[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(rows.size())))];
        const int sa = slice_of_row(spec, row_a);
        if (spec.size(sa) < 2) continue;
        int row_b = spec.slice_begin(sa) + uniform_index(rng, spec.size(sa) - 1);
        if (row_b >= row_a) ++row_b;
        const int col = 1 + uniform_index(rng, spec.factors());
        ExchangeMove mv;
        mv.kind = MoveKind::within_slice;
        mv.column = col;
        mv.row_a = std::min(row_a, row_b);
        mv.row_b = std::max(row_a, row_b);
        mv.old_a = work.levels(mv.row_a, col);
        mv.old_b = work.levels(mv.row_b, col);
        mv.new_a = mv.old_b;
        mv.new_b = mv.old_a;
        mv.slice_a = sa;
        mv.slice_b = sa;
        apply_move(work, mv);
        const long long new_repeats = repeating_count(grid_projection(work, slice));
        bool ok = new_repeats < repeats;
        if (ok)
          for (int e = 1; e <= spec.slice_count() && ok; ++e)
            if (locked[static_cast<std::size_t>(e)])
              ok = repeating_count(grid_projection(work, e)) == 0;
        if (ok) {
          eval.commit(mv);
          detail::check_structure_after_accept(work, "part1");
          repeats = new_repeats;
        } else {
          revert_move(work, mv);
        }
      }
      if (repeats == 0) {
        locked[static_cast<std::size_t>(slice)] = 1;
      } else {
        out.dedup_warning = true;
      }
    }

    for (int iter = 0; iter < params.budget_per_slice; ++iter) {
      const auto mv = within_slice_neighbor(work, slice, rng);
      if (!mv) break;
      if (eval.preview(*mv).combined >= eval.current().combined) continue;
      if (!locked_scales_stay_clean(*mv)) continue;
      apply_move(work, *mv);
      eval.commit(*mv);
      detail::check_structure_after_accept(work, "part1");
    }
  }

  for (int e = 1; e <= spec.slice_count(); ++e)
    out.repeat_free[static_cast<std::size_t>(e - 1)] =
        repeating_count(grid_projection(work, e)) == 0;
  out.final_value = eval.current();
  out.matrix = std::move(work);
  return out;
}

/// Part II: per slice (same order), greedy different-/out-slice exchanges
/// that strictly improve the criterion while every repeat-free applicable
/// scale stays repeat free.
inline TwoPartResult part2(const LevelMatrix& m0, const CriterionConfig& cfg,
                           const TwoPartParams& params) {
  params.validate();
  const SliceSpec& spec = m0.spec;
  std::mt19937_64 rng(splitmix64(params.seed ^ 0x7061727432ULL));
  LevelMatrix work = m0;
  CsmEvaluator eval(work, cfg);
  TwoPartResult out{work, std::vector<char>(static_cast<std::size_t>(spec.slice_count()), 0),
                    false, eval.current(), eval.current()};
  std::vector<char> locked(static_cast<std::size_t>(spec.slice_count() + 1), 0);
  for (int e = 1; e <= spec.slice_count(); ++e)
    locked[static_cast<std::size_t>(e)] =
        detail::power_exceeds(spec.size(e), spec.factors(), spec.total_runs()) &&
        repeating_count(grid_projection(work, e)) == 0;

  auto locked_scales_stay_clean = [&](const ExchangeMove& mv) {
    apply_move(work, mv);
    bool ok = true;
    for (int e = 1; e <= spec.slice_count(); ++e)
      if (locked[static_cast<std::size_t>(e)] && repeating_count(grid_projection(work, e)) > 0) {
        ok = false;
        break;
      }
    revert_move(work, mv);
    return ok;
  };

  for (int slice : detail::ascending_size_order(spec)) {
    for (int iter = 0; iter < params.budget_per_slice; ++iter) {
      std::optional<ExchangeMove> mv;
      const bool try_different = slice < spec.slice_count() && uniform_index(rng, 2) == 0;
      if (try_different) {
        mv = different_slice_neighbor(work, slice, rng);
        if (!mv) mv = out_slice_neighbor(work, slice, rng);
      } else {
        mv = out_slice_neighbor(work, slice, rng);
        if (!mv && slice < spec.slice_count()) mv = different_slice_neighbor(work, slice, rng);
      }
      if (!mv) continue;
      if (eval.preview(*mv).combined >= eval.current().combined) continue;
      if (!locked_scales_stay_clean(*mv)) continue;
      apply_move(work, *mv);
      eval.commit(*mv);
      detail::check_structure_after_accept(work, "part2");
    }
  }

  for (int e = 1; e <= spec.slice_count(); ++e)
    out.repeat_free[static_cast<std::size_t>(e - 1)] =
        repeating_count(grid_projection(work, e)) == 0;
  out.final_value = eval.current();
  out.matrix = std::move(work);
  return out;
}

/// Advisory: with many more coarse cells than runs in every slice, Part II
/// barely moves the criterion and can be skipped.
inline bool should_skip_part2(const SliceSpec& spec, double cell_ratio = 10.0) {
  for (int i = 1; i <= spec.slice_count(); ++i) {
    const long long threshold = static_cast<long long>(cell_ratio * spec.total_runs());
    if (!detail::power_exceeds(spec.size(i), spec.factors(), threshold)) return false;
  }
  return true;
}

}  // namespace fslhd
