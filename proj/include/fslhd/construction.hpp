#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fslhd/level_matrix.hpp"
#include "fslhd/matrix.hpp"
#include "fslhd/rng.hpp"
#include "fslhd/slice_spec.hpp"

namespace fslhd {

/// Deterministic assignment of the index pool {1,...,n} to slices.
/// groups[i-1] holds the indices assigned to slice i (insertion order);
/// theta[j-1] is the number of indices consumed while processing j.
struct SliceAssignment {
  SliceSpec spec;
  std::vector<std::vector<int>> groups;
  std::vector<int> theta;
};

/// Splits {1,...,n} into slice index groups H^1..H^u such that the scaled
/// group ceil(n_i * h / n), h in H^i, covers {1,...,n_i} exactly once.
///
/// Sweep j = 1..n: after adding j to the pool, each slice whose coarse bin
/// ceil(n_i * j / n) is about to advance claims the smallest pooled index
/// that still lands in the current bin. Slices claim in ascending slice
/// index. Deterministic; all randomness of the construction lives in the
/// permutation step.
inline SliceAssignment assign_slices(const SliceSpec& spec) {
  const int n = spec.total_runs();
  const int u = spec.slice_count();
  SliceAssignment out{spec, std::vector<std::vector<int>>(static_cast<std::size_t>(u)),
                      std::vector<int>(static_cast<std::size_t>(n), 0)};
  std::vector<char> pooled(static_cast<std::size_t>(n) + 1, 0);
  for (int j = 1; j <= n; ++j) {
    pooled[static_cast<std::size_t>(j)] = 1;
    int theta = 0;
    std::vector<int> advancing;  // slices whose bin advances at this j, ascending
    for (int i = 1; i <= u; ++i) {
      const long long ni = spec.size(i);
      const int step = static_cast<int>(ceil_div(ni * (j + 1), n) - ceil_div(ni * j, n));
      theta += step;
      if (step == 1) advancing.push_back(i);
    }
    out.theta[static_cast<std::size_t>(j - 1)] = theta;
    for (int l : advancing) {
      const long long nl = spec.size(l);
      const long long bin = ceil_div(nl * j, n);
      int claimed = 0;
      for (int r = 1; r <= n; ++r) {
        if (pooled[static_cast<std::size_t>(r)] && ceil_div(nl * r, n) == bin) {
          claimed = r;
          break;
        }
      }
      if (claimed == 0)
        throw std::logic_error("assign_slices: empty candidate set (this is a bug)");
      out.groups[static_cast<std::size_t>(l - 1)].push_back(claimed);
      pooled[static_cast<std::size_t>(claimed)] = 0;
    }
  }
  for (int r = 1; r <= n; ++r)
    if (pooled[static_cast<std::size_t>(r)])
      throw std::logic_error("assign_slices: pool not exhausted (this is a bug)");
  for (int i = 1; i <= u; ++i)
    if (static_cast<int>(out.groups[static_cast<std::size_t>(i - 1)].size()) != spec.size(i))
      throw std::logic_error("assign_slices: group size mismatch (this is a bug)");
  return out;
}

/// Scales permuted index groups h^1..h^u to one level column: m = t' * h,
/// stacked slice-major.
inline std::vector<int> scaled_column(const SliceSpec& spec,
                                      const std::vector<std::vector<int>>& permuted) {
  if (static_cast<int>(permuted.size()) != spec.slice_count())
    throw std::invalid_argument("scaled_column: need one group per slice");
  std::vector<int> column;
  column.reserve(static_cast<std::size_t>(spec.total_runs()));
  const int tp = spec.whole_scale();
  for (int i = 1; i <= spec.slice_count(); ++i) {
    const auto& g = permuted[static_cast<std::size_t>(i - 1)];
    if (static_cast<int>(g.size()) != spec.size(i))
      throw std::invalid_argument("scaled_column: group size mismatch");
    for (int h : g) column.push_back(tp * h);
  }
  return column;
}

/// Generates a random level matrix: the deterministic slice assignment is
/// shared by all columns; each column then permutes every group uniformly at
/// random on its own substream and scales by t'. Columns are independent, so
/// they could be generated in parallel without changing the output.
inline LevelMatrix generate_level_matrix(const SliceSpec& spec, std::uint64_t seed) {
  const SliceAssignment assignment = assign_slices(spec);
  IntMat levels(spec.total_runs(), spec.factors());
  for (int c = 1; c <= spec.factors(); ++c) {
    std::mt19937_64 rng = make_stream(seed, static_cast<std::uint64_t>(c));
    std::vector<std::vector<int>> permuted = assignment.groups;
    for (auto& g : permuted) fisher_yates(g, rng);
    const std::vector<int> column = scaled_column(spec, permuted);
    for (int r = 1; r <= spec.total_runs(); ++r)
      levels(r, c) = column[static_cast<std::size_t>(r - 1)];
  }
  return LevelMatrix(spec, std::move(levels));
}

}  // namespace fslhd
