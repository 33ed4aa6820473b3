// Minimal library walkthrough: construct a sliced design with slices of
// sizes 4, 8 and 12 in two factors, improve it, and print the criterion.

#include <iostream>

#include "fslhd/construction.hpp"
#include "fslhd/criteria.hpp"
#include "fslhd/sese.hpp"

int main() {
  const fslhd::SliceSpec spec({4, 8, 12}, 2);
  const fslhd::LevelMatrix initial = fslhd::generate_level_matrix(spec, /*seed=*/42);

  fslhd::CriterionConfig criterion;  // phi criterion, t = 50, Euclidean, w = 1/2
  fslhd::SeseParams params;
  params.inner_tries = 20;
  params.seed = 42;

  const fslhd::SeseResult result = fslhd::sese_optimize(initial, criterion, params);
  std::cout << spec.label() << "\n"
            << "initial phi_CSM: " << result.initial.combined << "\n"
            << "final   phi_CSM: " << result.final_value.combined << "\n";
  return 0;
}
