#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fslhd/construction.hpp"
#include "fslhd/criteria.hpp"
#include "fslhd/csv.hpp"
#include "fslhd/level_matrix.hpp"
#include "fslhd/sese.hpp"
#include "fslhd/svg.hpp"
#include "fslhd/twopart.hpp"

namespace fslhd {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitStructure = 3;

/// Parsed command-line configuration. Everything is flag-driven; no
/// environment variables are consulted, so a recorded command line is enough
/// to reproduce a run.
struct RunConfig {
  std::vector<int> slices;
  int factors = 2;
  CriterionConfig criterion;
  std::string algorithm = "sese";  // sese | twopart | none
  std::uint64_t seed = 0;
  int inner_tries = 20;
  int outer_cycles = 10;
  int part_budget = 100;
  bool skip_part2 = false;
  long long repeats = 1000;
  JitterMode jitter = JitterMode::midpoint;
  bool strict = false;
  bool check_structure_only = false;
  std::string in_path;
  std::string out_path;
  std::string levels_path;
  std::string meta_path;
  std::string trace_path;
  int dim_x = 1;
  int dim_y = 2;
  int grid = 0;
};

namespace detail {

inline int fail_config(std::ostream& err, const std::string& reason) {
  err << "error: " << reason << "\n";
  return kExitConfig;
}

inline int fail_io(std::ostream& err, const std::string& reason) {
  err << "error: " << reason << "\n";
  return kExitIo;
}

template <typename WriteFn>
bool write_file(const std::string& path, WriteFn&& fn) {
  std::ofstream os(path);
  if (!os) return false;
  fn(os);
  os.flush();
  return static_cast<bool>(os);
}

inline SliceSpec make_spec(const RunConfig& cfg) { return SliceSpec(cfg.slices, cfg.factors); }

inline nlohmann::json spec_json(const SliceSpec& spec) {
  return nlohmann::json{{"slices", spec.slice_sizes()},
                        {"factors", spec.factors()},
                        {"runs", spec.total_runs()},
                        {"levels", spec.level_count()}};
}

inline nlohmann::json criterion_json(const CriterionConfig& c) {
  return nlohmann::json{{"kind", c.kind == CriterionKind::phi_t ? "phi_t" : "cd2"},
                        {"t", c.t},
                        {"dist_power", c.dist_power},
                        {"w", c.w}};
}

inline nlohmann::json value_json(const CriterionValue& v) {
  return nlohmann::json{{"whole", v.whole}, {"per_slice", v.per_slice}, {"combined", v.combined}};
}

inline const char* move_kind_name(int kind) {
  switch (kind) {
    case 0: return "within_slice";
    case 1: return "different_slice";
    case 2: return "out_slice";
    default: return "none";
  }
}

inline bool write_trace(const std::string& path, const OptimizerTrace& trace) {
  return write_file(path, [&](std::ostream& os) {
    for (const TraceRecord& r : trace.records) {
      nlohmann::json j{{"slice", r.slice},       {"outer", r.outer},
                       {"inner", r.inner},       {"column", r.column},
                       {"kind", move_kind_name(r.move_kind)},
                       {"gap", r.gap},           {"draw", r.accept_draw},
                       {"accepted", r.accepted}, {"phi", r.phi_current},
                       {"phi_best", r.phi_best}, {"th", r.threshold},
                       {"n_ac", r.n_ac},         {"n_im", r.n_im},
                       {"flag_im", r.flag_im}};
      os << j.dump() << "\n";
    }
  });
}

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Writes the design (and optional levels) files for a final matrix.
inline int export_design(const RunConfig& cfg, const LevelMatrix& m, std::ostream& err) {
  const DesignMatrix d = to_design(m, cfg.jitter, cfg.seed);
  if (!write_file(cfg.out_path, [&](std::ostream& os) { write_design_csv(os, d); }))
    return fail_io(err, "cannot write design file '" + cfg.out_path + "'");
  if (!cfg.levels_path.empty() &&
      !write_file(cfg.levels_path, [&](std::ostream& os) { write_levels_csv(os, m); }))
    return fail_io(err, "cannot write levels file '" + cfg.levels_path + "'");
  return kExitOk;
}

}  // namespace detail

/// `construct`: generate one random design and write it out.
inline int cmd_construct(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::StopWatch watch;
  if (cfg.out_path.empty()) return detail::fail_config(err, "construct requires --out");
  try {
    const SliceSpec spec = detail::make_spec(cfg);
    const LevelMatrix m = generate_level_matrix(spec, cfg.seed);
    if (const int rc = detail::export_design(cfg, m, err); rc != kExitOk) return rc;
    if (!cfg.meta_path.empty()) {
      nlohmann::json meta{{"command", "construct"},
                          {"spec", detail::spec_json(spec)},
                          {"seed", cfg.seed},
                          {"jitter", cfg.jitter == JitterMode::midpoint ? "midpoint" : "uniform"},
                          {"design_file", cfg.out_path},
                          {"wall_time_ms", watch.ms()}};
      if (!detail::write_file(cfg.meta_path, [&](std::ostream& os) { os << meta.dump(2) << "\n"; }))
        return detail::fail_io(err, "cannot write metadata file '" + cfg.meta_path + "'");
    }
    out << "wrote " << spec.label() << " design to " << cfg.out_path << "\n";
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    return detail::fail_config(err, e.what());
  }
}

/// `optimize`: construct an initial design from the seed, improve it with
/// the configured algorithm, and write design/trace/summary files.
inline int cmd_optimize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::StopWatch watch;
  if (cfg.out_path.empty()) return detail::fail_config(err, "optimize requires --out");
  if (cfg.algorithm != "sese" && cfg.algorithm != "twopart" && cfg.algorithm != "none")
    return detail::fail_config(err, "unknown algorithm '" + cfg.algorithm + "'");
  try {
    const SliceSpec spec = detail::make_spec(cfg);
    cfg.criterion.validate();
    const LevelMatrix initial = generate_level_matrix(spec, cfg.seed);
    nlohmann::json summary{{"command", "optimize"},
                           {"algorithm", cfg.algorithm},
                           {"spec", detail::spec_json(spec)},
                           {"criterion", detail::criterion_json(cfg.criterion)},
                           {"seed", cfg.seed}};

    LevelMatrix best = initial;
    if (cfg.algorithm == "sese") {
      SeseParams params;
      params.inner_tries = cfg.inner_tries;
      params.outer_cycles = cfg.outer_cycles;
      params.seed = cfg.seed;
      SeseResult res = sese_optimize(initial, cfg.criterion, params);
      best = res.best;
      summary["initial"] = detail::value_json(res.initial);
      summary["final"] = detail::value_json(res.final_value);
      summary["inner_steps"] = res.trace.records.size();
      if (!cfg.trace_path.empty() && !detail::write_trace(cfg.trace_path, res.trace))
        return detail::fail_io(err, "cannot write trace file '" + cfg.trace_path + "'");
    } else if (cfg.algorithm == "twopart") {
      TwoPartParams params;
      params.budget_per_slice = cfg.part_budget;
      params.seed = cfg.seed;
      TwoPartResult r1 = part1(initial, cfg.criterion, params);
      summary["initial"] = detail::value_json(r1.initial);
      summary["part1"] = detail::value_json(r1.final_value);
      const bool advisory_skip = should_skip_part2(spec);
      summary["part2_advisory_skip"] = advisory_skip;
      TwoPartResult final_res = std::move(r1);
      if (!cfg.skip_part2) {
        final_res = part2(final_res.matrix, cfg.criterion, params);
        summary["part2"] = detail::value_json(final_res.final_value);
      }
      best = final_res.matrix;
      summary["final"] = detail::value_json(final_res.final_value);
      summary["dedup_warning"] = final_res.dedup_warning;
      nlohmann::json repeat_free = nlohmann::json::object();
      for (int i = 1; i <= spec.slice_count(); ++i)
        if (detail::power_exceeds(spec.size(i), spec.factors(), spec.total_runs()))
          repeat_free["slice_" + std::to_string(i)] =
              static_cast<bool>(final_res.repeat_free[static_cast<std::size_t>(i - 1)]);
      summary["repeat_free"] = repeat_free;
      if (!cfg.trace_path.empty()) {
        OptimizerTrace empty;
        if (!detail::write_trace(cfg.trace_path, empty))
          return detail::fail_io(err, "cannot write trace file '" + cfg.trace_path + "'");
      }
    } else {
      const CriterionValue v = csm(to_design(initial, JitterMode::midpoint), cfg.criterion);
      summary["initial"] = detail::value_json(v);
      summary["final"] = detail::value_json(v);
    }

    if (const int rc = detail::export_design(cfg, best, err); rc != kExitOk) return rc;
    summary["design_file"] = cfg.out_path;
    summary["wall_time_ms"] = watch.ms();
    if (!cfg.meta_path.empty() &&
        !detail::write_file(cfg.meta_path, [&](std::ostream& os) { os << summary.dump(2) << "\n"; }))
      return detail::fail_io(err, "cannot write summary file '" + cfg.meta_path + "'");
    out << "initial phi_CSM: " << summary["initial"]["combined"].get<double>() << "\n";
    out << "final   phi_CSM: " << summary["final"]["combined"].get<double>() << "\n";
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    return detail::fail_config(err, e.what());
  } catch (const std::domain_error& e) {
    return detail::fail_config(err, e.what());
  }
}

/// `eval`: read a design file, print criterion values and the structure
/// verdict. With --strict a structure violation sets exit code 3.
inline int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.in_path.empty()) return detail::fail_config(err, "eval requires --in");
  std::ifstream is(cfg.in_path);
  if (!is) return detail::fail_io(err, "cannot read design file '" + cfg.in_path + "'");
  try {
    const DesignMatrix d = read_design_csv(is);
    out << "design: " << d.spec.label() << "\n";

    if (cfg.check_structure_only) {
      const StructureReport report = check_design_structure(d);
      if (report.ok) {
        out << "structure: ok\n";
        return kExitOk;
      }
      out << "structure: violated (" << report.message << ")\n";
      return kExitStructure;
    }

    try {
      cfg.criterion.validate();
      CriterionConfig phi_cfg = cfg.criterion;
      phi_cfg.kind = CriterionKind::phi_t;
      const CriterionValue v = csm(d, phi_cfg);
      out << "phi_t(D): " << detail::format_coord(v.whole) << "\n";
      for (int i = 1; i <= d.spec.slice_count(); ++i)
        out << "phi_t(slice " << i << "): "
            << detail::format_coord(v.per_slice[static_cast<std::size_t>(i - 1)]) << "\n";
      out << "phi_CSM: " << detail::format_coord(v.combined) << "\n";
    } catch (const std::exception& e) {
      out << "phi_t: n/a (" << e.what() << ")\n";
    }
    try {
      out << "cd2(D): " << detail::format_coord(cd2(whole_view(d))) << "\n";
    } catch (const std::exception& e) {
      out << "cd2(D): n/a (" << e.what() << ")\n";
    }
    try {
      out << "min_distance: " << detail::format_coord(min_intersite_distance(whole_view(d),
                                                                             cfg.criterion.dist_power))
          << "\n";
    } catch (const std::exception& e) {
      out << "min_distance: n/a (" << e.what() << ")\n";
    }

    const StructureReport report = check_design_structure(d);
    if (report.ok) {
      out << "structure: ok\n";
    } else {
      out << "structure: violated (" << report.message << ")\n";
      if (cfg.strict) return kExitStructure;
    }
    return kExitOk;
  } catch (const std::runtime_error& e) {
    return detail::fail_io(err, e.what());
  } catch (const std::invalid_argument& e) {
    return detail::fail_config(err, e.what());
  }
}

struct CompareStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double sd = 0.0;
  long long count = 0;
};

/// Criterion statistics over `repeats` randomly constructed designs.
inline CompareStats random_baseline(const SliceSpec& spec, const CriterionConfig& criterion,
                                    long long repeats, std::uint64_t seed) {
  CompareStats stats;
  stats.count = repeats;
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  const std::uint64_t stream_base = splitmix64(seed ^ 0xBA5E11BA5E11ULL);
  for (long long r = 0; r < repeats; ++r) {
    const LevelMatrix m =
        generate_level_matrix(spec, splitmix64(stream_base + static_cast<std::uint64_t>(r)));
    const double v = csm(to_design(m, JitterMode::midpoint), criterion).combined;
    if (r == 0 || v < stats.min) stats.min = v;
    if (r == 0 || v > stats.max) stats.max = v;
    sum += v;
    sum_sq += static_cast<long double>(v) * v;
  }
  if (repeats > 0) {
    stats.mean = static_cast<double>(sum / repeats);
    const long double var = sum_sq / repeats - (sum / repeats) * (sum / repeats);
    stats.sd = static_cast<double>(var > 0.0L ? sqrtl(var) : 0.0L);
  }
  return stats;
}

/// `compare`: random-construction baseline statistics next to one optimizer
/// run on the same spec.
inline int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  detail::StopWatch watch;
  if (cfg.repeats < 1) return detail::fail_config(err, "compare requires --repeats >= 1");
  try {
    const SliceSpec spec = detail::make_spec(cfg);
    cfg.criterion.validate();
    const CompareStats stats = random_baseline(spec, cfg.criterion, cfg.repeats, cfg.seed);

    out << "design: " << spec.label() << "\n";
    out << "source,min,mean,max,sd\n";
    out << "random(R=" << cfg.repeats << ")," << detail::format_coord(stats.min) << ","
        << detail::format_coord(stats.mean) << "," << detail::format_coord(stats.max) << ","
        << detail::format_coord(stats.sd) << "\n";

    nlohmann::json meta{{"command", "compare"},
                        {"spec", detail::spec_json(spec)},
                        {"criterion", detail::criterion_json(cfg.criterion)},
                        {"seed", cfg.seed},
                        {"repeats", cfg.repeats},
                        {"random", {{"min", stats.min},
                                    {"mean", stats.mean},
                                    {"max", stats.max},
                                    {"sd", stats.sd}}}};

    if (cfg.algorithm != "none") {
      const LevelMatrix initial = generate_level_matrix(spec, cfg.seed);
      double final_value = 0.0;
      if (cfg.algorithm == "sese") {
        SeseParams params;
        params.inner_tries = cfg.inner_tries;
        params.outer_cycles = cfg.outer_cycles;
        params.seed = cfg.seed;
        final_value = sese_optimize(initial, cfg.criterion, params).final_value.combined;
      } else if (cfg.algorithm == "twopart") {
        TwoPartParams params;
        params.budget_per_slice = cfg.part_budget;
        params.seed = cfg.seed;
        TwoPartResult res = part1(initial, cfg.criterion, params);
        if (!cfg.skip_part2) res = part2(res.matrix, cfg.criterion, params);
        final_value = res.final_value.combined;
      } else {
        return detail::fail_config(err, "unknown algorithm '" + cfg.algorithm + "'");
      }
      out << cfg.algorithm << "," << detail::format_coord(final_value) << ",,,\n";
      meta["optimizer"] = {{"algorithm", cfg.algorithm}, {"phi_csm", final_value}};
    }

    meta["wall_time_ms"] = watch.ms();
    if (!cfg.meta_path.empty() &&
        !detail::write_file(cfg.meta_path, [&](std::ostream& os) { os << meta.dump(2) << "\n"; }))
      return detail::fail_io(err, "cannot write metadata file '" + cfg.meta_path + "'");
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    return detail::fail_config(err, e.what());
  } catch (const std::domain_error& e) {
    return detail::fail_config(err, e.what());
  }
}

/// `plot`: emit an SVG scatter of a 2-D projection of a design file.
inline int cmd_plot(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.in_path.empty()) return detail::fail_config(err, "plot requires --in");
  if (cfg.out_path.empty()) return detail::fail_config(err, "plot requires --out");
  std::ifstream is(cfg.in_path);
  if (!is) return detail::fail_io(err, "cannot read design file '" + cfg.in_path + "'");
  try {
    const DesignMatrix d = read_design_csv(is);
    PlotOptions opts;
    opts.dim_x = cfg.dim_x;
    opts.dim_y = cfg.dim_y;
    opts.grid = cfg.grid;
    const std::string svg = render_scatter_svg(d, opts);
    if (!detail::write_file(cfg.out_path, [&](std::ostream& os) { os << svg; }))
      return detail::fail_io(err, "cannot write SVG file '" + cfg.out_path + "'");
    out << "wrote " << cfg.out_path << "\n";
    return kExitOk;
  } catch (const std::runtime_error& e) {
    return detail::fail_io(err, e.what());
  } catch (const std::invalid_argument& e) {
    return detail::fail_config(err, e.what());
  }
}

}  // namespace fslhd
