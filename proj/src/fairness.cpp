#include "reconcile/fairness.hpp"

#include <cmath>

#include "random.hpp"

namespace recon {

Predictor corrupt_on_group(const Predictor& f, const GroupIndicator& p, std::uint64_t seed) {
  if (p.size() != f.size()) throw AlignmentError("group mask and predictor differ in length");
  if (p.empty()) throw EmptyGroupError("cannot corrupt an empty group");
  auto rng = detail::make_rng(seed, detail::kCorruption);
  std::uniform_real_distribution<double> u(f.range().lo, f.range().hi);
  std::vector<double> v(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (p[i]) v[i] = f.range().clamp(u(rng));
  }
  return Predictor(std::move(v), f.range());
}

FairnessReport fairness_experiment(const Predictor& f1, const Predictor& f2, const Dataset& d,
                                   const GroupIndicator& minority, const ReconcileParams& params,
                                   const FairnessConfig& cfg) {
  params.validate();
  const GroupIndicator majority = cfg.majority.value_or(minority.complement());
  if (minority.size() != d.size() || majority.size() != d.size()) {
    throw AlignmentError("group masks and dataset differ in length");
  }

  FairnessReport rep;
  const Predictor start2 = cfg.corrupt ? corrupt_on_group(f2, minority, cfg.seed) : f2;
  rep.run = reconcile(f1, start2, d, params);

  const Predictor* models[2][2] = {{&rep.run.f1_initial, &rep.run.f1_final},
                                   {&rep.run.f2_initial, &rep.run.f2_final}};
  for (int m = 0; m < 2; ++m) {
    for (int ph = 0; ph < 2; ++ph) {
      rep.grid[m][ph][static_cast<int>(Cohort::majority)] = restricted_brier(*models[m][ph], d, majority);
      rep.grid[m][ph][static_cast<int>(Cohort::minority)] = restricted_brier(*models[m][ph], d, minority);
    }
  }

  rep.minority_mass = group_mass(minority, d);
  rep.majority_mass = group_mass(majority, d);
  rep.slack = std::sqrt(4.0 * params.epsilon + 3.0 * params.alpha);
  rep.subgroup_bound = rep.at(1, Phase::before, Cohort::minority) + rep.slack;
  rep.applicable = rep.minority_mass >= rep.slack;
  rep.bound_satisfied = rep.at(2, Phase::after, Cohort::minority) <= rep.subgroup_bound;
  return rep;
}

}  // namespace recon
