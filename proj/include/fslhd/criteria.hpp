#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fslhd/level_matrix.hpp"
#include "fslhd/slice_spec.hpp"

namespace fslhd {

enum class CriterionKind { phi_t, cd2 };

/// Space-filling criterion configuration. The combined measurement weights
/// the whole-design value by w and each slice by its run-count share.
struct CriterionConfig {
  CriterionKind kind = CriterionKind::phi_t;
  int t = 50;          // distance-sum exponent of the phi criterion
  int dist_power = 2;  // 1 = rectangular distance, 2 = Euclidean
  double w = 0.5;      // whole-design weight, must lie in (0,1)

  void validate() const {
    if (t < 1) throw std::invalid_argument("CriterionConfig: t must be >= 1");
    if (dist_power != 1 && dist_power != 2)
      throw std::invalid_argument("CriterionConfig: dist_power must be 1 or 2");
    if (!(w > 0.0 && w < 1.0)) throw std::invalid_argument("CriterionConfig: w must be in (0,1)");
  }
};

/// Whole-design value, per-slice values, and their weighted combination.
struct CriterionValue {
  double whole = 0.0;
  std::vector<double> per_slice;
  double combined = 0.0;
};

/// Read-only view of a block of design rows (the whole design or one slice).
struct PointsView {
  const double* data = nullptr;
  int n = 0;
  int q = 0;
  const double* row(int r) const { return data + static_cast<std::size_t>(r - 1) * q; }
};

inline PointsView whole_view(const DesignMatrix& d) {
  return PointsView{d.points.data().data(), d.spec.total_runs(), d.spec.factors()};
}

inline PointsView slice_view(const DesignMatrix& d, int slice) {
  const int begin = d.spec.slice_begin(slice);
  return PointsView{d.points.data().data() + static_cast<std::size_t>(begin - 1) * d.spec.factors(),
                    d.spec.size(slice), d.spec.factors()};
}

namespace detail {

/// Sum over dimensions of |x_k - y_k|^m (the inter-site distance before the
/// final 1/m root).
inline long double pair_power_distance(const double* x, const double* y, int q, int m) {
  long double acc = 0.0L;
  for (int k = 0; k < q; ++k) {
    const long double diff = std::fabs(static_cast<long double>(x[k]) - y[k]);
    acc += (m == 2) ? diff * diff : diff;
  }
  return acc;
}

/// d^{-t} from the power-m distance sum.
inline long double inverse_power_term(long double power_dist, int t, int m) {
  return powl(power_dist, -static_cast<long double>(t) / static_cast<long double>(m));
}

}  // namespace detail

/// Smallest inter-site distance over all unordered point pairs.
inline double min_intersite_distance(const PointsView& v, int dist_power = 2) {
  if (v.n < 2) throw std::invalid_argument("min_intersite_distance: need at least 2 points");
  long double best = -1.0L;
  for (int i = 1; i < v.n; ++i)
    for (int j = i + 1; j <= v.n; ++j) {
      const long double pd = detail::pair_power_distance(v.row(i), v.row(j), v.q, dist_power);
      if (best < 0.0L || pd < best) best = pd;
    }
  return static_cast<double>(powl(best, 1.0L / dist_power));
}

/// Distance-based criterion (sum over pairs of d^{ -t })^{1/t}; minimizing it
/// pushes the minimum inter-site distance up as t grows.
inline double phi_t(const PointsView& v, const CriterionConfig& cfg) {
  cfg.validate();
  if (v.n < 2) throw std::invalid_argument("phi_t: need at least 2 points");
  long double sum = 0.0L;
  for (int i = 1; i < v.n; ++i)
    for (int j = i + 1; j <= v.n; ++j) {
      const long double pd = detail::pair_power_distance(v.row(i), v.row(j), v.q, cfg.dist_power);
      if (pd <= 0.0L) throw std::domain_error("phi_t: degenerate design (coincident points)");
      sum += detail::inverse_power_term(pd, cfg.t, cfg.dist_power);
    }
  return static_cast<double>(powl(sum, 1.0L / cfg.t));
}

/// Centered L2 discrepancy of a design in [0,1]^q, with per-dimension
/// product terms inside each point and point-pair factor.
inline double cd2(const PointsView& v) {
  if (v.n < 1) throw std::invalid_argument("cd2: empty design");
  const long double nn = v.n;
  long double single = 0.0L;
  for (int i = 1; i <= v.n; ++i) {
    const double* xi = v.row(i);
    long double prod = 1.0L;
    for (int k = 0; k < v.q; ++k) {
      if (!(xi[k] >= 0.0 && xi[k] <= 1.0)) throw std::domain_error("cd2: point outside [0,1]");
      const long double a = fabsl(static_cast<long double>(xi[k]) - 0.5L);
      prod *= 1.0L + 0.5L * a - 0.5L * a * a;
    }
    single += prod;
  }
  long double pair = 0.0L;
  for (int i = 1; i <= v.n; ++i) {
    const double* xi = v.row(i);
    // diagonal term j == i
    long double diag = 1.0L;
    for (int k = 0; k < v.q; ++k)
      diag *= 1.0L + fabsl(static_cast<long double>(xi[k]) - 0.5L);
    pair += diag;
    for (int j = i + 1; j <= v.n; ++j) {
      const double* xj = v.row(j);
      long double prod = 1.0L;
      for (int k = 0; k < v.q; ++k) {
        const long double ai = fabsl(static_cast<long double>(xi[k]) - 0.5L);
        const long double aj = fabsl(static_cast<long double>(xj[k]) - 0.5L);
        const long double d = fabsl(static_cast<long double>(xi[k]) - xj[k]);
        prod *= 1.0L + 0.5L * ai + 0.5L * aj - 0.5L * d;
      }
      pair += 2.0L * prod;
    }
  }
  const long double c0 = 13.0L / 12.0L;
  const long double squared = c0 * c0 - (2.0L / nn) * single + pair / (nn * nn);
  if (squared < 0.0L)
    throw std::domain_error("cd2: negative squared discrepancy (formula undefined here)");
  return static_cast<double>(sqrtl(squared));
}

/// Combined space-filling measurement: w * (whole-design value) +
/// (1 - w) * sum over slices of (n_i/n) * (slice value), for either
/// criterion kind. Full recomputation; the incremental path lives in
/// DistanceCache.
inline CriterionValue csm(const DesignMatrix& d, const CriterionConfig& cfg) {
  cfg.validate();
  const SliceSpec& spec = d.spec;
  CriterionValue out;
  auto eval = [&](const PointsView& v, int slice) -> double {
    try {
      return cfg.kind == CriterionKind::phi_t ? phi_t(v, cfg) : cd2(v);
    } catch (const std::exception& e) {
      const std::string where = slice == 0 ? "whole design" : "slice " + std::to_string(slice);
      throw std::domain_error("csm: " + where + ": " + e.what());
    }
  };
  out.whole = eval(whole_view(d), 0);
  long double weighted = 0.0L;
  out.per_slice.resize(static_cast<std::size_t>(spec.slice_count()));
  for (int i = 1; i <= spec.slice_count(); ++i) {
    const double value = eval(slice_view(d, i), i);
    out.per_slice[static_cast<std::size_t>(i - 1)] = value;
    weighted += static_cast<long double>(spec.slice_weight(i)) * value;
  }
  out.combined = static_cast<double>(cfg.w * static_cast<long double>(out.whole) +
                                     (1.0L - cfg.w) * weighted);
  return out;
}

}  // namespace fslhd
