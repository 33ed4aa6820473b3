#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "fslhd/construction.hpp"
#include "fslhd/sese.hpp"
#include "support/oracles.hpp"

using namespace fslhd;

TEST_CASE("candidate budgets follow the documented formulas") {
  CHECK(budgets_from_counts({12, 0, 0}).within == 3);     // ceil(12/5)
  CHECK(budgets_from_counts({1000, 0, 0}).within == 50);  // capped
  const InnerBudgets none_diff = budgets_from_counts({12, 0, 7});
  CHECK(none_diff.different == 0);
  CHECK(none_diff.out == 7);
  const InnerBudgets split = budgets_from_counts({12, 30, 70});
  CHECK(split.different == 15);  // floor(50 * 30 / 100)
  CHECK(split.out == 35);
  const InnerBudgets small = budgets_from_counts({12, 3, 4});
  CHECK(small.different + small.out == 7);
}

TEST_CASE("budget derivation on the (4,6) worked spec") {
  const LevelMatrix m = generate_level_matrix(SliceSpec({4, 6}, 2), 31);
  const InnerBudgets b = derive_inner_budgets(m, 1);
  CHECK(b.within == 3);  // n_in-slice = 12
  CHECK(b.different + b.out >= 1);
}

TEST_CASE("parameter validation") {
  SeseParams p;
  p.inner_tries = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.inner_tries = 101;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.inner_tries = 100;
  CHECK_NOTHROW(p.validate());
  p.beta1 = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

namespace {

SeseResult small_run(std::uint64_t seed, double th0_factor = 0.005) {
  const LevelMatrix m0 = generate_level_matrix(SliceSpec({3, 4, 5}, 2), seed);
  CriterionConfig cfg;
  SeseParams params;
  params.inner_tries = 10;
  params.outer_cycles = 3;
  params.th0_factor = th0_factor;
  params.seed = seed;
  return sese_optimize(m0, cfg, params);
}

}  // namespace

TEST_CASE("acceptance decisions replay exactly from the trace") {
  const SeseResult res = small_run(5);
  int steps_with_candidates = 0;
  for (const TraceRecord& r : res.trace.records) {
    CHECK(r.threshold > 0.0);
    if (r.move_kind < 0) continue;
    ++steps_with_candidates;
    CHECK(r.accepted == (r.gap <= r.threshold * r.accept_draw));
  }
  CHECK(steps_with_candidates > 50);
}

TEST_CASE("the recorded best value never increases") {
  const SeseResult res = small_run(9);
  double last = res.initial.combined;
  for (const TraceRecord& r : res.trace.records) {
    CHECK(r.phi_best <= last + 1e-15);
    last = r.phi_best;
  }
  CHECK(res.final_value.combined <= res.initial.combined);
  CHECK(res.final_value.combined == last);
}

TEST_CASE("a huge threshold accepts every candidate in the first cycle") {
  const SeseResult res = small_run(11, /*th0_factor=*/1e12);
  int first_cycle_accepts = 0;
  for (const TraceRecord& r : res.trace.records) {
    if (r.slice != 1 || r.outer != 1) continue;
    if (r.move_kind >= 0) {
      CHECK(r.accepted);
      ++first_cycle_accepts;
    }
  }
  CHECK(first_cycle_accepts == 10);
}

TEST_CASE("a vanishing threshold rejects strictly worse candidates") {
  const SeseResult res = small_run(13, /*th0_factor=*/1e-300);
  for (const TraceRecord& r : res.trace.records) {
    if (r.move_kind < 0) continue;
    if (r.gap > 0.0) CHECK_FALSE(r.accepted);
    if (r.accepted) CHECK(r.gap <= 0.0);
  }
}

TEST_CASE("runs are deterministic per seed") {
  const SeseResult a = small_run(21);
  const SeseResult b = small_run(21);
  const SeseResult c = small_run(22);
  CHECK(a.best.levels == b.best.levels);
  CHECK(a.final_value.combined == b.final_value.combined);
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  for (std::size_t i = 0; i < a.trace.records.size(); ++i) {
    CHECK(a.trace.records[i].gap == b.trace.records[i].gap);
    CHECK(a.trace.records[i].accept_draw == b.trace.records[i].accept_draw);
    CHECK(a.trace.records[i].accepted == b.trace.records[i].accepted);
  }
  CHECK(a.best.levels != c.best.levels);
}

TEST_CASE("the result is structurally valid and improves the start") {
  const SeseResult res = small_run(33);
  CHECK(validate_sliced_structure(res.best));
  CHECK(res.final_value.combined < res.initial.combined);
  const oracle::CsmValues expect = oracle::csm(to_design(res.best, JitterMode::midpoint), CriterionConfig{});
  CHECK(std::abs(res.final_value.combined - static_cast<double>(expect.combined)) /
            static_cast<double>(expect.combined) <
        1e-9);
}

TEST_CASE("inner steps cycle through the columns") {
  const SeseResult res = small_run(41);
  for (const TraceRecord& r : res.trace.records) CHECK(r.column == (r.inner % 2) + 1);
}

TEST_CASE("the discrepancy criterion also drives the optimizer") {
  const LevelMatrix m0 = generate_level_matrix(SliceSpec({3, 4}, 2), 55);
  CriterionConfig cfg;
  cfg.kind = CriterionKind::cd2;
  SeseParams params;
  params.inner_tries = 8;
  params.outer_cycles = 2;
  params.seed = 55;
  const SeseResult res = sese_optimize(m0, cfg, params);
  CHECK(validate_sliced_structure(res.best));
  CHECK(res.final_value.combined <= res.initial.combined);
}
