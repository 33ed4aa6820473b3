#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fslhd/criteria.hpp"
#include "fslhd/level_matrix.hpp"
#include "fslhd/slice_spec.hpp"

namespace fslhd {

/// Pairwise-distance cache for the phi criterion with O(n) incremental
/// updates for the three exchange kinds (value swap inside a slice, value
/// swap across two slices, replacement of one value).
///
/// Only the distances touched by a move are recomputed: a move in column k
/// changes d(x_r, x_v)^m by h = |x_sk - x_vk|^m - |x_rk - x_vk|^m and
/// d(x_s, x_v)^m by -h, so one move refreshes O(n) cached d^{-t} terms.
/// The power sums themselves are re-added from the term table on every
/// evaluation instead of being carried incrementally: at t = 50 the terms
/// span dozens of orders of magnitude, and a running accumulator that once
/// held a dominant near-minimal pair keeps that pair's rounding residue
/// after the pair separates. Summing positive terms afresh is immune to
/// this and costs only an O(n^2) add loop.
class DistanceCache {
 public:
  DistanceCache(const DesignMatrix& d, const CriterionConfig& cfg)
      : spec_(d.spec), cfg_(cfg), x_(d.points) {
    cfg_.validate();
    if (cfg_.kind != CriterionKind::phi_t)
      throw std::invalid_argument("DistanceCache: only the phi criterion has incremental updates");
    const int n = spec_.total_runs();
    for (int i = 1; i <= spec_.slice_count(); ++i)
      if (spec_.size(i) < 2)
        throw std::invalid_argument("DistanceCache: slice " + std::to_string(i) +
                                    " has fewer than 2 points");
    row_slice_.resize(static_cast<std::size_t>(n) + 1);
    for (int r = 1; r <= n; ++r) row_slice_[static_cast<std::size_t>(r)] = slice_of_row(spec_, r);
    dp_.resize(pair_count());
    term_.resize(pair_count());
    for (int r = 1; r < n; ++r)
      for (int s = r + 1; s <= n; ++s) {
        const long double pd =
            detail::pair_power_distance(row(r), row(s), spec_.factors(), cfg_.dist_power);
        if (pd <= 0.0L)
          throw std::domain_error("DistanceCache: degenerate design (coincident points)");
        dp_[pair_index(r, s)] = pd;
        term_[pair_index(r, s)] = detail::inverse_power_term(pd, cfg_.t, cfg_.dist_power);
      }
    value_ = assemble_value(0, 0, nullptr, nullptr);
  }

  const SliceSpec& spec() const { return spec_; }
  const CriterionConfig& config() const { return cfg_; }
  const CriterionValue& current() const { return value_; }
  double point(int r, int k) const { return x_(r, k); }

  /// Power-m distance sum of a pair, as cached.
  long double pair_power_distance(int r, int s) const {
    return dp_[pair_index(std::min(r, s), std::max(r, s))];
  }

  /// Whole-design power sum, re-added from the cached terms.
  long double whole_power_sum() const {
    long double sum = 0.0L;
    for (long double t : term_) sum += t;
    return sum;
  }

  /// Criterion after swapping column-k values of rows r and s; no mutation.
  CriterionValue preview_swap(int r, int s, int k) const {
    std::vector<long double> term_r, term_s;
    touched_swap_terms(r, s, k, nullptr, term_r, term_s);
    return assemble_value(r, s, term_r.data(), term_s.data());
  }

  /// Criterion after replacing the column-k value of row r; no mutation.
  CriterionValue preview_replace(int r, int k, double new_x) const {
    check_open_unit(new_x);
    std::vector<long double> term_r;
    touched_replace_terms(r, k, new_x, nullptr, term_r);
    return assemble_value(r, 0, term_r.data(), nullptr);
  }

  /// Commits a swap of rows in the same slice.
  CriterionValue apply_within_slice_update(int r, int s, int k) {
    if (slice_of(r) != slice_of(s))
      throw std::invalid_argument("apply_within_slice_update: rows lie in different slices");
    return commit_swap(r, s, k);
  }

  /// Commits a swap of rows in two different slices.
  CriterionValue apply_different_slice_update(int r, int s, int k) {
    if (slice_of(r) == slice_of(s))
      throw std::invalid_argument("apply_different_slice_update: rows lie in the same slice");
    return commit_swap(r, s, k);
  }

  /// Commits a replacement of one value by an unused (out-slice) one.
  CriterionValue apply_out_slice_update(int r, int k, double new_x) {
    check_open_unit(new_x);
    std::vector<long double> dp_r, term_r;
    touched_replace_terms(r, k, new_x, &dp_r, term_r);
    for (int v = 1; v <= spec_.total_runs(); ++v) {
      if (v == r) continue;
      const std::size_t idx = pair_index(std::min(r, v), std::max(r, v));
      dp_[idx] = dp_r[static_cast<std::size_t>(v)];
      term_[idx] = term_r[static_cast<std::size_t>(v)];
    }
    x_(r, k) = new_x;
    finish_commit();
    return value_;
  }

  /// Throws if the cached working coordinates have drifted from `d`.
  void verify_sync(const DesignMatrix& d) const {
    if (!(d.spec == spec_) || checksum_of(d.points) != checksum())
      throw std::logic_error("DistanceCache: cache and design are out of sync");
  }

  /// FNV-1a hash over the working coordinate bit patterns.
  std::uint64_t checksum() const { return checksum_of(x_); }

 private:
  int slice_of(int r) const { return row_slice_[static_cast<std::size_t>(r)]; }
  const double* row(int r) const {
    return x_.data().data() + static_cast<std::size_t>(r - 1) * spec_.factors();
  }
  std::size_t pair_count() const {
    const std::size_t n = static_cast<std::size_t>(spec_.total_runs());
    return n * (n - 1) / 2;
  }
  std::size_t pair_index(int r, int s) const {  // requires r < s
    const std::size_t n = static_cast<std::size_t>(spec_.total_runs());
    const std::size_t rr = static_cast<std::size_t>(r);
    return (rr - 1) * (2 * n - rr) / 2 + static_cast<std::size_t>(s - r) - 1;
  }

  static void check_open_unit(double x) {
    if (!(x > 0.0 && x < 1.0))
      throw std::invalid_argument("out-slice replacement value must lie in (0,1)");
  }

  static std::uint64_t checksum_of(const RealMat& m) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : m.data()) {
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(v));
      __builtin_memcpy(&bits, &v, sizeof(bits));
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffULL;
        h *= 0x100000001b3ULL;
      }
    }
    return h;
  }

  long double fresh_term(long double pd) const {
    if (pd <= 0.0L)
      throw std::domain_error("DistanceCache: update would produce coincident points");
    return detail::inverse_power_term(pd, cfg_.t, cfg_.dist_power);
  }

  /// Fills, for v != r,s, the post-swap terms of pairs (r,v) and (s,v),
  /// indexed by v. Optionally also reports the new power distances.
  void touched_swap_terms(int r, int s, int k, std::vector<long double>* dp_out_r,
                          std::vector<long double>& term_r,
                          std::vector<long double>& term_s,
                          std::vector<long double>* dp_out_s = nullptr) const {
    if (r == s || r < 1 || s < 1 || r > spec_.total_runs() || s > spec_.total_runs())
      throw std::invalid_argument("distance update: bad row pair");
    const int n = spec_.total_runs();
    term_r.assign(static_cast<std::size_t>(n) + 1, 0.0L);
    term_s.assign(static_cast<std::size_t>(n) + 1, 0.0L);
    if (dp_out_r) dp_out_r->assign(static_cast<std::size_t>(n) + 1, 0.0L);
    if (dp_out_s) dp_out_s->assign(static_cast<std::size_t>(n) + 1, 0.0L);
    const long double xr = x_(r, k);
    const long double xs = x_(s, k);
    const int m = cfg_.dist_power;
    for (int v = 1; v <= n; ++v) {
      if (v == r || v == s) continue;
      const long double xv = x_(v, k);
      const long double dr = fabsl(xr - xv);
      const long double ds = fabsl(xs - xv);
      const long double h = (m == 2) ? ds * ds - dr * dr : ds - dr;
      const long double dp_rv = dp_[pair_index(std::min(r, v), std::max(r, v))] + h;
      const long double dp_sv = dp_[pair_index(std::min(s, v), std::max(s, v))] - h;
      term_r[static_cast<std::size_t>(v)] = h == 0.0L
          ? term_[pair_index(std::min(r, v), std::max(r, v))]
          : fresh_term(dp_rv);
      term_s[static_cast<std::size_t>(v)] = h == 0.0L
          ? term_[pair_index(std::min(s, v), std::max(s, v))]
          : fresh_term(dp_sv);
      if (dp_out_r) (*dp_out_r)[static_cast<std::size_t>(v)] = dp_rv;
      if (dp_out_s) (*dp_out_s)[static_cast<std::size_t>(v)] = dp_sv;
    }
  }

  /// Same for a replacement: post-move terms of pairs (r,v), indexed by v.
  void touched_replace_terms(int r, int k, double new_x, std::vector<long double>* dp_out,
                             std::vector<long double>& term_r) const {
    if (r < 1 || r > spec_.total_runs())
      throw std::invalid_argument("distance update: bad row index");
    const int n = spec_.total_runs();
    term_r.assign(static_cast<std::size_t>(n) + 1, 0.0L);
    if (dp_out) dp_out->assign(static_cast<std::size_t>(n) + 1, 0.0L);
    const long double xr = x_(r, k);
    const long double xn = new_x;
    const int m = cfg_.dist_power;
    for (int v = 1; v <= n; ++v) {
      if (v == r) continue;
      const long double xv = x_(v, k);
      const long double dn = fabsl(xn - xv);
      const long double dr = fabsl(xr - xv);
      const long double h = (m == 2) ? dn * dn - dr * dr : dn - dr;
      const long double dp_rv = dp_[pair_index(std::min(r, v), std::max(r, v))] + h;
      term_r[static_cast<std::size_t>(v)] = h == 0.0L
          ? term_[pair_index(std::min(r, v), std::max(r, v))]
          : fresh_term(dp_rv);
      if (dp_out) (*dp_out)[static_cast<std::size_t>(v)] = dp_rv;
    }
  }

  /// Sums the term table with rows r and/or s redirected to replacement
  /// term arrays (indexed by the other row of the pair). r == 0 and s == 0
  /// evaluate the table as stored. For swaps the (r,s) pair itself keeps its
  /// stored term: swapping one column's values between the two rows leaves
  /// their mutual distance unchanged.
  CriterionValue assemble_value(int r, int s, const long double* term_r,
                                const long double* term_s) const {
    const int n = spec_.total_runs();
    long double whole = 0.0L;
    std::vector<long double> per_slice(static_cast<std::size_t>(spec_.slice_count()), 0.0L);
    for (int i = 1; i < n; ++i) {
      const bool i_is_r = i == r;
      const bool i_is_s = i == s;
      for (int j = i + 1; j <= n; ++j) {
        long double term;
        if ((i_is_r || i_is_s) && (j == r || j == s)) {
          term = term_[pair_index(i, j)];
        } else if (i_is_r || j == r) {
          term = term_r[i_is_r ? static_cast<std::size_t>(j) : static_cast<std::size_t>(i)];
        } else if (i_is_s || j == s) {
          term = term_s[i_is_s ? static_cast<std::size_t>(j) : static_cast<std::size_t>(i)];
        } else {
          term = term_[pair_index(i, j)];
        }
        whole += term;
        if (slice_of(i) == slice_of(j))
          per_slice[static_cast<std::size_t>(slice_of(i) - 1)] += term;
      }
    }
    CriterionValue out;
    const long double inv_t = 1.0L / static_cast<long double>(cfg_.t);
    if (!(whole > 0.0L))
      throw std::logic_error("DistanceCache: whole-design power sum went non-positive");
    out.whole = static_cast<double>(powl(whole, inv_t));
    out.per_slice.resize(per_slice.size());
    long double weighted = 0.0L;
    for (int i = 1; i <= spec_.slice_count(); ++i) {
      const long double sum = per_slice[static_cast<std::size_t>(i - 1)];
      if (!(sum > 0.0L))
        throw std::logic_error("DistanceCache: slice power sum went non-positive");
      const long double phi = powl(sum, inv_t);
      out.per_slice[static_cast<std::size_t>(i - 1)] = static_cast<double>(phi);
      weighted += static_cast<long double>(spec_.slice_weight(i)) * phi;
    }
    out.combined = static_cast<double>(cfg_.w * static_cast<long double>(out.whole) +
                                       (1.0L - cfg_.w) * weighted);
    return out;
  }

  CriterionValue commit_swap(int r, int s, int k) {
    std::vector<long double> dp_r, dp_s, term_r, term_s;
    touched_swap_terms(r, s, k, &dp_r, term_r, term_s, &dp_s);
    for (int v = 1; v <= spec_.total_runs(); ++v) {
      if (v == r || v == s) continue;
      const std::size_t ir = pair_index(std::min(r, v), std::max(r, v));
      const std::size_t is = pair_index(std::min(s, v), std::max(s, v));
      dp_[ir] = dp_r[static_cast<std::size_t>(v)];
      term_[ir] = term_r[static_cast<std::size_t>(v)];
      dp_[is] = dp_s[static_cast<std::size_t>(v)];
      term_[is] = term_s[static_cast<std::size_t>(v)];
    }
    std::swap(x_(r, k), x_(s, k));
    finish_commit();
    return value_;
  }

  void finish_commit() { value_ = assemble_value(0, 0, nullptr, nullptr); }

  SliceSpec spec_;
  CriterionConfig cfg_;
  RealMat x_;
  std::vector<int> row_slice_;
  std::vector<long double> dp_;    // packed upper-triangular power-m distances
  std::vector<long double> term_;  // packed d^{-t} terms
  CriterionValue value_;
};

}  // namespace fslhd
