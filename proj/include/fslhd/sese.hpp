#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fslhd/evaluator.hpp"
#include "fslhd/level_matrix.hpp"
#include "fslhd/neighborhood.hpp"
#include "fslhd/rng.hpp"

namespace fslhd {

/// Parameters of the sliced stochastic evolutionary search.
struct SeseParams {
  int inner_tries = 20;       // P; scales with the problem, never above 100
  int outer_cycles = 10;      // N
  double th0_factor = 0.005;  // initial threshold = th0_factor * initial criterion
  double beta1 = 0.8;         // threshold contraction while improving
  double beta2 = 0.7;         // threshold growth factor while exploring
  double beta3 = 0.9;         // threshold decay factor while exploring
  double tol = 0.1;           // absolute improvement that counts as progress
  std::uint64_t seed = 0;

  void validate() const {
    if (inner_tries < 1 || inner_tries > 100)
      throw std::invalid_argument("SeseParams: inner_tries must lie in [1,100]");
    if (outer_cycles < 1) throw std::invalid_argument("SeseParams: outer_cycles must be >= 1");
    if (!(th0_factor > 0.0)) throw std::invalid_argument("SeseParams: th0_factor must be > 0");
    for (double b : {beta1, beta2, beta3})
      if (!(b > 0.0 && b < 1.0))
        throw std::invalid_argument("SeseParams: beta factors must lie in (0,1)");
    if (tol < 0.0) throw std::invalid_argument("SeseParams: tol must be >= 0");
  }
};

/// Per-candidate-step trace record. flag_im reports the improving/exploring
/// classification of the previous outer cycle (0 before the first update).
struct TraceRecord {
  int slice = 0;
  int outer = 0;
  int inner = 0;
  int column = 0;
  int move_kind = -1;  // -1: no candidate available this step
  double gap = 0.0;
  double accept_draw = 0.0;
  bool accepted = false;
  double phi_current = 0.0;
  double phi_best = 0.0;
  double threshold = 0.0;
  int n_ac = 0;
  int n_im = 0;
  int flag_im = 0;
};

struct OptimizerTrace {
  std::vector<TraceRecord> records;
};

struct InnerBudgets {
  int within = 0;   // I1
  int different = 0;  // I2
  int out = 0;      // I3
};

/// Candidate budgets from neighbor counts. The within-slice budget is a
/// fifth of the within-slice neighbor count, rounded up and capped at 50;
/// the different-/out-slice budgets share min(n_diff + n_out, 50)
/// proportionally, rounding the different-slice share down.
inline InnerBudgets budgets_from_counts(const NeighborCounts& counts) {
  InnerBudgets b;
  if (counts.n_in_slice > 0)
    b.within = static_cast<int>(std::min<long long>(ceil_div(counts.n_in_slice, 5), 50));
  const long long cross = counts.n_diff_slice + counts.n_out_slice;
  if (cross > 0) {
    const long long total = std::min<long long>(cross, 50);
    b.different = static_cast<int>(total * counts.n_diff_slice / cross);
    b.out = static_cast<int>(total) - b.different;
  }
  return b;
}

inline InnerBudgets derive_inner_budgets(const LevelMatrix& m, int slice) {
  return budgets_from_counts(count_neighbors(m, slice));
}

struct SeseResult {
  LevelMatrix best;
  OptimizerTrace trace;
  CriterionValue initial;
  CriterionValue final_value;
};

/// Threshold-accepting search over the exchange neighborhoods, run slice by
/// slice: each slice's optimization starts from the best design of the
/// previous one. Every outer cycle resets nothing but the counters; the
/// threshold follows the improving/exploring schedule. Deterministic for a
/// fixed seed.
inline SeseResult sese_optimize(const LevelMatrix& m0, const CriterionConfig& cfg,
                                const SeseParams& params) {
  params.validate();
  cfg.validate();
  const SliceSpec& spec = m0.spec;
  const int q = spec.factors();
  std::mt19937_64 rng(splitmix64(params.seed ^ 0x5e5e5e5e5e5e5e5eULL));

  CsmEvaluator eval(m0, cfg);
  const CriterionValue initial = eval.current();
  const double th0 = params.th0_factor * initial.combined;

  LevelMatrix best = m0;
  double phi_best = initial.combined;
  CriterionValue best_value = initial;
  OptimizerTrace trace;
  int flag_im = 0;

  for (int slice = 1; slice <= spec.slice_count(); ++slice) {
    eval.rebuild(best);
    double phi = phi_best;
    double th = th0;
    const InnerBudgets budgets = derive_inner_budgets(best, slice);

    for (int outer = 1; outer <= params.outer_cycles; ++outer) {
      const double phi_old_best = phi_best;
      int n_ac = 0;
      int n_im = 0;

      for (int inner = 1; inner <= params.inner_tries; ++inner) {
        const int column = (inner % q) + 1;

        // Draw the slice's candidate pool in this column; failed
        // different-/out-slice draws fall back to within-slice moves.
        bool have_best = false;
        ExchangeMove best_move;
        CriterionValue best_cv;
        auto consider = [&](const std::optional<ExchangeMove>& mv) {
          if (!mv) return false;
          const CriterionValue cv = eval.preview(*mv);
          if (!have_best || cv.combined < best_cv.combined) {
            have_best = true;
            best_move = *mv;
            best_cv = cv;
          }
          return true;
        };
        auto within = [&]() { return within_slice_neighbor(eval.matrix(), slice, rng, column); };
        for (int c = 0; c < budgets.within; ++c) consider(within());
        for (int c = 0; c < budgets.different; ++c)
          if (!consider(different_slice_neighbor(eval.matrix(), slice, rng, column)))
            consider(within());
        for (int c = 0; c < budgets.out; ++c)
          if (!consider(out_slice_neighbor(eval.matrix(), slice, rng, column)))
            consider(within());

        TraceRecord rec;
        rec.slice = slice;
        rec.outer = outer;
        rec.inner = inner;
        rec.column = column;
        rec.threshold = th;
        rec.flag_im = flag_im;
        if (have_best) {
          rec.move_kind = static_cast<int>(best_move.kind);
          rec.gap = best_cv.combined - phi;
          rec.accept_draw = uniform_real01(rng);
          rec.accepted = rec.gap <= th * rec.accept_draw;
          if (rec.accepted) {
            eval.commit(best_move);
            if (!validate_sliced_structure(eval.matrix()))
              throw std::logic_error("sese_optimize: accepted exchange broke the sliced structure");
            phi = eval.current().combined;
            ++n_ac;
            if (phi < phi_best) {
              best = eval.matrix();
              phi_best = phi;
              best_value = eval.current();
              ++n_im;
            }
          }
        }
        rec.phi_current = phi;
        rec.phi_best = phi_best;
        rec.n_ac = n_ac;
        rec.n_im = n_im;
        trace.records.push_back(rec);
      }

      flag_im = (phi_old_best - phi_best > params.tol) ? 1 : 0;
      const int P = params.inner_tries;
      if (flag_im == 1) {
        if (10 * n_ac > P && n_im < n_ac)
          th *= params.beta1;
        else if (10 * n_ac > P && n_im == n_ac)
          ;  // keep
        else
          th /= params.beta1;
      } else {
        if (5 * n_ac <= 4 * P)
          th /= params.beta2;
        else
          th *= params.beta3;
      }
    }
  }

  if (!validate_sliced_structure(best))
    throw std::logic_error("sese_optimize: result lost the sliced structure (this is a bug)");
  return SeseResult{std::move(best), std::move(trace), initial, best_value};
}

}  // namespace fslhd
