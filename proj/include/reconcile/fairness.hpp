#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "reconcile/core.hpp"
#include "reconcile/engine.hpp"

namespace recon {

// Replaces f on the members of p with i.i.d. uniform draws over f's range.
Predictor corrupt_on_group(const Predictor& f, const GroupIndicator& p, std::uint64_t seed);

struct FairnessConfig {
  std::uint64_t seed = 0;
  bool corrupt = true;                       // false runs the harness on f2 as given
  std::optional<GroupIndicator> majority;    // defaults to the complement of the minority
};

enum class Phase { before, after };
enum class Cohort { majority, minority };

struct FairnessReport {
  // restricted Brier indexed [model - 1][phase][cohort]
  std::array<std::array<std::array<double, 2>, 2>, 2> grid{};
  double minority_mass = 0.0;
  double majority_mass = 0.0;
  double slack = 0.0;        // sqrt(4 eps + 3 alpha)
  double subgroup_bound = 0.0;  // B(f1)|_P + slack
  bool applicable = false;   // minority_mass >= slack
  bool bound_satisfied = false;
  ReconcileResult run;

  double at(int model, Phase ph, Cohort c) const {
    return grid[static_cast<std::size_t>(model - 1)][static_cast<std::size_t>(ph)][static_cast<std::size_t>(c)];
  }
};

// Corrupts f2 on the minority (unless disabled), reconciles f1 against it and
// fills the model x phase x cohort grid. bound_satisfied is evaluated on every
// run; it is only guaranteed when `applicable`.
FairnessReport fairness_experiment(const Predictor& f1, const Predictor& f2, const Dataset& d,
                                   const GroupIndicator& minority, const ReconcileParams& params,
                                   const FairnessConfig& cfg = {});

}  // namespace recon
