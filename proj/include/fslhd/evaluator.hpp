#pragma once

#include <optional>
#include <stdexcept>

#include "fslhd/criteria.hpp"
#include "fslhd/distance_cache.hpp"
#include "fslhd/level_matrix.hpp"
#include "fslhd/neighborhood.hpp"

namespace fslhd {

/// Scores and commits exchange moves against the midpoint design of a level
/// matrix. The phi criterion runs on the incremental distance cache; the
/// discrepancy criterion is cheap enough to recompute in full.
///
/// The evaluator shadows the caller's matrix; commit() checks each move's
/// old levels against the shadow, so a caller whose matrix drifts out of
/// sync fails loudly instead of silently scoring the wrong design.
class CsmEvaluator {
 public:
  CsmEvaluator(const LevelMatrix& m, const CriterionConfig& cfg) : m_(m), cfg_(cfg) {
    cfg_.validate();
    rebuild(m);
  }

  const CriterionValue& current() const {
    return cfg_.kind == CriterionKind::phi_t ? cache_->current() : value_;
  }

  /// The level matrix this evaluator currently scores.
  const LevelMatrix& matrix() const { return m_; }

  CriterionValue preview(const ExchangeMove& mv) const {
    check_move(mv);
    if (cfg_.kind == CriterionKind::phi_t) {
      if (mv.kind == MoveKind::out_slice)
        return cache_->preview_replace(mv.row_a, mv.column, coord(mv.new_a));
      return cache_->preview_swap(mv.row_a, mv.row_b, mv.column);
    }
    RealMat& pts = scratch_->points;
    mutate(pts, mv);
    CriterionValue v;
    try {
      v = csm(*scratch_, cfg_);
    } catch (...) {
      unmutate(pts, mv);
      throw;
    }
    unmutate(pts, mv);
    return v;
  }

  void commit(const ExchangeMove& mv) {
    check_move(mv);
    apply_move(m_, mv);
    if (cfg_.kind == CriterionKind::phi_t) {
      if (mv.kind == MoveKind::out_slice)
        cache_->apply_out_slice_update(mv.row_a, mv.column, coord(mv.new_a));
      else if (mv.slice_a == mv.slice_b)
        cache_->apply_within_slice_update(mv.row_a, mv.row_b, mv.column);
      else
        cache_->apply_different_slice_update(mv.row_a, mv.row_b, mv.column);
    } else {
      mutate(scratch_->points, mv);
      value_ = csm(*scratch_, cfg_);
    }
  }

  /// Resynchronizes to a (possibly different) matrix of the same spec.
  void rebuild(const LevelMatrix& m) {
    if (!(m.spec == m_.spec)) throw std::invalid_argument("CsmEvaluator: spec mismatch");
    m_ = m;
    const DesignMatrix d = to_design(m_, JitterMode::midpoint);
    if (cfg_.kind == CriterionKind::phi_t) {
      cache_.emplace(d, cfg_);
    } else {
      scratch_.emplace(d);
      value_ = csm(*scratch_, cfg_);
    }
  }

  /// Cheap guard against caller/evaluator divergence.
  void verify_sync(const LevelMatrix& m) const {
    if (!(m.levels == m_.levels))
      throw std::logic_error("CsmEvaluator: caller matrix out of sync with evaluator");
  }

 private:
  double coord(int level) const {
    return (static_cast<double>(level) - 0.5) / m_.spec.level_count();
  }

  void check_move(const ExchangeMove& mv) const {
    if (m_.levels(mv.row_a, mv.column) != mv.old_a ||
        (mv.kind != MoveKind::out_slice && m_.levels(mv.row_b, mv.column) != mv.old_b))
      throw std::logic_error("CsmEvaluator: move does not match the evaluated design");
  }

  void mutate(RealMat& pts, const ExchangeMove& mv) const {
    pts(mv.row_a, mv.column) = coord(mv.new_a);
    if (mv.kind != MoveKind::out_slice) pts(mv.row_b, mv.column) = coord(mv.new_b);
  }
  void unmutate(RealMat& pts, const ExchangeMove& mv) const {
    pts(mv.row_a, mv.column) = coord(mv.old_a);
    if (mv.kind != MoveKind::out_slice) pts(mv.row_b, mv.column) = coord(mv.old_b);
  }

  LevelMatrix m_;
  CriterionConfig cfg_;
  std::optional<DistanceCache> cache_;            // phi path
  mutable std::optional<DesignMatrix> scratch_;   // discrepancy path
  CriterionValue value_;                  // discrepancy path current value
};

}  // namespace fslhd
