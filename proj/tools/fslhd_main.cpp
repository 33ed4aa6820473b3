#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fslhd/commands.hpp"

namespace {

void add_spec_flags(CLI::App* sub, fslhd::RunConfig& cfg) {
  sub->add_option("--slices", cfg.slices, "Slice run sizes, e.g. --slices 3,4,5")
      ->required()
      ->delimiter(',');
  sub->add_option("--factors", cfg.factors, "Number of factors (columns)");
}

void add_criterion_flags(CLI::App* sub, fslhd::RunConfig& cfg) {
  sub->add_option_function<std::string>(
         "--criterion",
         [&cfg](const std::string& kind) {
           if (kind == "phi_t")
             cfg.criterion.kind = fslhd::CriterionKind::phi_t;
           else if (kind == "cd2")
             cfg.criterion.kind = fslhd::CriterionKind::cd2;
           else
             throw CLI::ValidationError("--criterion must be phi_t or cd2");
         },
         "Criterion kind: phi_t (default) or cd2");
  sub->add_option("--t", cfg.criterion.t, "Exponent of the phi criterion (default 50)");
  sub->add_option("--dist-power", cfg.criterion.dist_power,
                  "Distance power: 1 rectangular, 2 Euclidean (default)");
  sub->add_option("--w", cfg.criterion.w, "Whole-design weight in (0,1), default 0.5");
}

void add_jitter_flag(CLI::App* sub, fslhd::RunConfig& cfg) {
  sub->add_option_function<std::string>(
         "--jitter",
         [&cfg](const std::string& mode) {
           if (mode == "midpoint")
             cfg.jitter = fslhd::JitterMode::midpoint;
           else if (mode == "uniform")
             cfg.jitter = fslhd::JitterMode::uniform;
           else
             throw CLI::ValidationError("--jitter must be midpoint or uniform");
         },
         "Export jitter: midpoint (default) or uniform");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Construction, optimization and evaluation of flexible sliced "
               "Latin hypercube designs"};
  app.require_subcommand(1);

  fslhd::RunConfig cfg;

  CLI::App* construct = app.add_subcommand("construct", "Generate a random sliced design");
  add_spec_flags(construct, cfg);
  add_jitter_flag(construct, cfg);
  construct->add_option("--seed", cfg.seed, "Random seed");
  construct->add_option("--out", cfg.out_path, "Design CSV output path")->required();
  construct->add_option("--levels", cfg.levels_path, "Also write the integer level matrix CSV");
  construct->add_option("--meta", cfg.meta_path, "Metadata JSON output path");

  CLI::App* optimize = app.add_subcommand("optimize", "Construct and optimize a sliced design");
  add_spec_flags(optimize, cfg);
  add_criterion_flags(optimize, cfg);
  add_jitter_flag(optimize, cfg);
  optimize->add_option("--algorithm", cfg.algorithm, "sese (default), twopart, or none");
  optimize->add_option("--seed", cfg.seed, "Random seed");
  optimize->add_option("--inner-iters", cfg.inner_tries, "Inner-loop tries per cycle (<= 100)");
  optimize->add_option("--outer-iters", cfg.outer_cycles, "Outer cycles per slice (default 10)");
  optimize->add_option("--part-budget", cfg.part_budget,
                       "Proposals per slice per part for twopart (default 100)");
  optimize->add_flag("--skip-part2", cfg.skip_part2, "Run only Part I of twopart");
  optimize->add_option("--out", cfg.out_path, "Design CSV output path")->required();
  optimize->add_option("--levels", cfg.levels_path, "Also write the integer level matrix CSV");
  optimize->add_option("--meta", cfg.meta_path, "Summary JSON output path");
  optimize->add_option("--trace", cfg.trace_path, "Line-delimited JSON trace output path");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate criteria and structure of a design file");
  eval->add_option("--in", cfg.in_path, "Design CSV input path")->required();
  add_criterion_flags(eval, cfg);
  eval->add_flag("--strict", cfg.strict, "Exit with code 3 on structure violations");
  eval->add_flag("--check-structure", cfg.check_structure_only,
                 "Only run the structure check; exit 3 on violation");

  CLI::App* compare = app.add_subcommand(
      "compare", "Random-construction baseline statistics vs one optimizer run");
  add_spec_flags(compare, cfg);
  add_criterion_flags(compare, cfg);
  compare->add_option("--repeats", cfg.repeats, "Number of random designs (default 1000)");
  compare->add_option("--algorithm", cfg.algorithm, "sese (default), twopart, or none");
  compare->add_option("--seed", cfg.seed, "Random seed");
  compare->add_option("--inner-iters", cfg.inner_tries, "Inner-loop tries per cycle (<= 100)");
  compare->add_option("--outer-iters", cfg.outer_cycles, "Outer cycles per slice (default 10)");
  compare->add_option("--part-budget", cfg.part_budget, "twopart proposals per slice");
  compare->add_flag("--skip-part2", cfg.skip_part2, "Run only Part I of twopart");
  compare->add_option("--meta", cfg.meta_path, "Metadata JSON output path");

  CLI::App* plot = app.add_subcommand("plot", "Render a 2-D projection of a design file as SVG");
  plot->add_option("--in", cfg.in_path, "Design CSV input path")->required();
  plot->add_option("--out", cfg.out_path, "SVG output path")->required();
  plot->add_option("--dims", [&cfg](const std::vector<std::string>& vals) {
        const auto fields = fslhd::detail::split_csv_line(vals.at(0));
        if (fields.size() != 2) return false;
        try {
          cfg.dim_x = std::stoi(fields[0]);
          cfg.dim_y = std::stoi(fields[1]);
        } catch (const std::exception&) {
          return false;
        }
        return true;
      },
      "Projection dimensions, e.g. --dims 1,2");
  plot->add_option("--grid", cfg.grid, "Overlay a g x g coarse grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? fslhd::kExitOk : fslhd::kExitConfig;
  }

  try {
    if (construct->parsed()) return fslhd::cmd_construct(cfg, std::cout, std::cerr);
    if (optimize->parsed()) return fslhd::cmd_optimize(cfg, std::cout, std::cerr);
    if (eval->parsed()) return fslhd::cmd_eval(cfg, std::cout, std::cerr);
    if (compare->parsed()) return fslhd::cmd_compare(cfg, std::cout, std::cerr);
    if (plot->parsed()) return fslhd::cmd_plot(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fslhd::kExitConfig;
  }
  return fslhd::kExitConfig;
}
