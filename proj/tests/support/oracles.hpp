#pragma once

// Test-only reference implementations, written as direct transliterations of
// the defining formulas. They deliberately share no code with the library
// paths they check.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "fslhd/criteria.hpp"
#include "fslhd/level_matrix.hpp"
#include "fslhd/neighborhood.hpp"
#include "fslhd/slice_spec.hpp"

namespace oracle {

using Points = std::vector<std::vector<double>>;  // rows of coordinates

inline Points points_of(const fslhd::DesignMatrix& d, int row_begin, int row_end) {
  Points pts;
  for (int r = row_begin; r <= row_end; ++r) {
    std::vector<double> row;
    for (int c = 1; c <= d.spec.factors(); ++c) row.push_back(d.points(r, c));
    pts.push_back(row);
  }
  return pts;
}

inline Points points_of(const fslhd::DesignMatrix& d) {
  return points_of(d, 1, d.spec.total_runs());
}

inline long double distance(const std::vector<double>& a, const std::vector<double>& b, int m) {
  long double acc = 0.0L;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const long double diff = fabsl(static_cast<long double>(a[k]) - b[k]);
    acc += m == 2 ? diff * diff : diff;
  }
  return powl(acc, 1.0L / m);
}

inline long double min_distance(const Points& pts, int m) {
  long double best = -1.0L;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const long double d = distance(pts[i], pts[j], m);
      if (best < 0.0L || d < best) best = d;
    }
  return best;
}

inline long double phi(const Points& pts, int t, int m) {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      sum += powl(distance(pts[i], pts[j], m), -static_cast<long double>(t));
  return powl(sum, 1.0L / t);
}

/// Straightforward triple-loop centered L2 discrepancy.
inline long double cd2(const Points& pts) {
  const long double n = static_cast<long double>(pts.size());
  const std::size_t q = pts[0].size();
  long double term_one = 0.0L;
  for (const auto& x : pts) {
    long double prod = 1.0L;
    for (std::size_t k = 0; k < q; ++k) {
      const long double a = fabsl(static_cast<long double>(x[k]) - 0.5L);
      prod *= 1.0L + 0.5L * a - 0.5L * a * a;
    }
    term_one += prod;
  }
  long double term_two = 0.0L;
  for (const auto& x : pts)
    for (const auto& y : pts) {
      long double prod = 1.0L;
      for (std::size_t k = 0; k < q; ++k) {
        const long double ax = fabsl(static_cast<long double>(x[k]) - 0.5L);
        const long double ay = fabsl(static_cast<long double>(y[k]) - 0.5L);
        const long double d = fabsl(static_cast<long double>(x[k]) - y[k]);
        prod *= 1.0L + 0.5L * ax + 0.5L * ay - 0.5L * d;
      }
      term_two += prod;
    }
  const long double c = 13.0L / 12.0L;
  return sqrtl(c * c - (2.0L / n) * term_one + term_two / (n * n));
}

/// Whole/per-slice/combined values recomputed from scratch.
struct CsmValues {
  long double whole = 0.0L;
  std::vector<long double> per_slice;
  long double combined = 0.0L;
};

inline CsmValues csm(const fslhd::DesignMatrix& d, const fslhd::CriterionConfig& cfg) {
  CsmValues v;
  const auto eval = [&](const Points& pts) {
    return cfg.kind == fslhd::CriterionKind::phi_t ? phi(pts, cfg.t, cfg.dist_power) : cd2(pts);
  };
  v.whole = eval(points_of(d));
  long double weighted = 0.0L;
  for (int i = 1; i <= d.spec.slice_count(); ++i) {
    const long double s = eval(points_of(d, d.spec.slice_begin(i), d.spec.slice_end(i)));
    v.per_slice.push_back(s);
    weighted += static_cast<long double>(d.spec.size(i)) / d.spec.total_runs() * s;
  }
  v.combined = cfg.w * v.whole + (1.0L - cfg.w) * weighted;
  return v;
}

/// Brute-force interval-occupancy verdict for one column of levels: does it
/// place exactly one entry in every whole-design bin and every slice bin?
inline bool column_occupancy(const fslhd::SliceSpec& spec, const std::vector<int>& col) {
  const int n = spec.total_runs();
  for (int bin = 1; bin <= n; ++bin) {
    int hits = 0;
    for (int r = 0; r < n; ++r) {
      const int lvl = col[static_cast<std::size_t>(r)];
      if (lvl >= 1 && lvl <= spec.level_count() &&
          lvl > (bin - 1) * spec.whole_scale() && lvl <= bin * spec.whole_scale())
        ++hits;
    }
    if (hits != 1) return false;
  }
  for (int i = 1; i <= spec.slice_count(); ++i)
    for (int bin = 1; bin <= spec.size(i); ++bin) {
      int hits = 0;
      for (int r = spec.slice_begin(i); r <= spec.slice_end(i); ++r) {
        const int lvl = col[static_cast<std::size_t>(r - 1)];
        if (lvl > (bin - 1) * spec.slice_scale(i) && lvl <= bin * spec.slice_scale(i)) ++hits;
      }
      if (hits != 1) return false;
    }
  return true;
}

/// Brute-force candidate set: try every level of b's slice-scale bin, apply
/// the induced exchange/replacement to a copy of the full matrix, and keep
/// the candidate iff the whole matrix still validates.
struct TauSets {
  std::vector<int> rho;
  std::vector<int> sigma;
};

inline TauSets tau(const fslhd::LevelMatrix& m, int slice, int column, int b) {
  const fslhd::SliceSpec& spec = m.spec;
  int b_row = 0;
  for (int r = spec.slice_begin(slice); r <= spec.slice_end(slice); ++r)
    if (m.levels(r, column) == b) b_row = r;
  if (b_row == 0) throw std::invalid_argument("oracle::tau: b not in slice/column");
  const int ti = spec.slice_scale(slice);
  const int bin_lo = static_cast<int>((fslhd::ceil_div(b, ti) - 1) * ti) + 1;
  TauSets out;
  for (int cand = bin_lo; cand < bin_lo + ti; ++cand) {
    if (cand == b) continue;
    int cand_row = 0;
    for (int r = 1; r <= spec.total_runs(); ++r)
      if (m.levels(r, column) == cand) cand_row = r;
    fslhd::LevelMatrix trial = m;
    if (cand_row != 0) {
      if (cand_row <= spec.slice_end(slice)) continue;  // same or earlier slice
      trial.levels(b_row, column) = cand;
      trial.levels(cand_row, column) = b;
      if (fslhd::validate_sliced_structure(trial)) out.rho.push_back(cand);
    } else {
      trial.levels(b_row, column) = cand;
      if (fslhd::validate_sliced_structure(trial)) out.sigma.push_back(cand);
    }
  }
  return out;
}

/// Random slice specification within the documented test envelope.
inline fslhd::SliceSpec random_spec(std::mt19937_64& rng, int max_u = 5, int max_ni = 12,
                                    int max_q = 6, int min_ni = 1) {
  const int u = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_u));
  std::vector<int> sizes;
  for (int i = 0; i < u; ++i)
    sizes.push_back(min_ni + static_cast<int>(rng() % static_cast<std::uint64_t>(max_ni - min_ni + 1)));
  const int q = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_q));
  return fslhd::SliceSpec(sizes, q);
}

/// Random structure-preserving move of any kind, or nothing if the sampled
/// kind has no candidates.
inline std::optional<fslhd::ExchangeMove> random_move(const fslhd::LevelMatrix& m,
                                                      std::mt19937_64& rng) {
  const int u = m.spec.slice_count();
  const int kind = static_cast<int>(rng() % 3);
  if (kind == 0) {
    const int slice = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(u));
    return fslhd::within_slice_neighbor(m, slice, rng);
  }
  if (kind == 1) {
    if (u < 2) return std::nullopt;
    const int slice = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(u - 1));
    return fslhd::different_slice_neighbor(m, slice, rng);
  }
  const int slice = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(u));
  return fslhd::out_slice_neighbor(m, slice, rng);
}

}  // namespace oracle
