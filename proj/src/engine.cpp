#include "reconcile/engine.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace recon {

void ReconcileParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError(fmt::format("alpha must lie in (0, 1], got {}", alpha));
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw ParameterError(fmt::format("epsilon must lie in (0, 1], got {}", epsilon));
  }
  if (grid && *grid < 1) throw ParameterError(fmt::format("grid size must be >= 1, got {}", *grid));
  if (max_rounds && *max_rounds < 0) throw ParameterError("max_rounds must be non-negative");
}

int ReconcileParams::grid_size() const { return grid ? *grid : default_grid_size(alpha, epsilon); }

int default_grid_size(double alpha, double epsilon) {
  return static_cast<int>(std::ceil(2.0 / (std::sqrt(alpha) * epsilon)));
}

double round_bound(double brier1, double brier2, double alpha, double epsilon) {
  return (brier1 + brier2) * 16.0 / (alpha * epsilon * epsilon);
}

double per_round_improvement(double alpha, double epsilon) { return alpha * epsilon * epsilon / 16.0; }

namespace {

void require_aligned(const Predictor& f1, const Predictor& f2, std::size_t n) {
  if (f1.size() != n || f2.size() != n) {
    throw AlignmentError(fmt::format("predictors of length {} and {} do not match {} rows", f1.size(), f2.size(), n));
  }
}

}  // namespace

Selection select_update(const Predictor& f1, const Predictor& f2, const Objective& obj, double eps, int round) {
  require_aligned(f1, f2, obj.size());
  const auto region = disagreement_region(f1, f2, eps);
  const auto& mu = obj.measure();

  Selection best;
  bool found = false;
  const Predictor* models[2] = {&f1, &f2};
  for (int i = 0; i < 2; ++i) {
    for (Direction dir : {Direction::greater, Direction::less}) {
      const GroupIndicator& g = dir == Direction::greater ? region.u_gt : region.u_lt;
      const double mass = mu.mass(g);
      double score = 0.0;
      if (mass > 0.0) {
        const double gap = obj.target_mean(g, round) - mu.mean(models[i]->values(), g);
        score = mass * gap * gap;
      }
      if (!found || score > best.score) {
        best = Selection{i + 1, dir, g, score};
        found = true;
      }
    }
  }
  return best;
}

Selection select_update(const Predictor& f1, const Predictor& f2, const Dataset& d, double eps) {
  return select_update(f1, f2, LabelObjective(d), eps);
}

ReconcileResult reconcile(const Predictor& f1, const Predictor& f2, const Objective& obj,
                          const ReconcileParams& params) {
  params.validate();
  require_aligned(f1, f2, obj.size());

  const auto& mu = obj.measure();
  const double alpha = params.alpha;
  const double eps = params.epsilon;
  const int m = params.grid_size();

  ReconcileResult res;
  res.f1_initial = f1;
  res.f2_initial = f2;
  res.alpha = alpha;
  res.epsilon = eps;
  res.grid = m;
  res.brier1_initial = obj.brier(f1.values());
  res.brier2_initial = obj.brier(f2.values());
  if (params.max_rounds) {
    res.max_rounds = *params.max_rounds;
  } else {
    const double bound = std::ceil(round_bound(res.brier1_initial, res.brier2_initial, alpha, eps)) + 1.0;
    res.max_rounds = bound >= static_cast<double>(std::numeric_limits<long>::max())
                         ? std::numeric_limits<long>::max()
                         : static_cast<long>(bound);
  }

  Predictor cur[2] = {f1, f2};
  double brier[2] = {res.brier1_initial, res.brier2_initial};
  int t = 0;
  res.disagreement_initial = disagreement_mass(f1, f2, eps, mu);
  double mass = res.disagreement_initial;

  while (mass >= alpha) {
    if (t >= res.max_rounds) {
      res.terminated_by = Termination::round_cap;
      break;
    }
    Selection sel = select_update(cur[0], cur[1], obj, eps, t);
    const int idx = sel.model - 1;

    RoundRecord rec;
    rec.t = t;
    rec.patched_model = sel.model;
    rec.direction = sel.direction;
    rec.group_mass = mu.mass(sel.group);
    rec.delta_raw = obj.target_mean(sel.group, t) - mu.mean(cur[idx].values(), sel.group);
    rec.delta = round_to_grid(rec.delta_raw, m);
    rec.brier_before = brier[idx];
    rec.disagreement_mass_before = mass;

    cur[idx] = patch(cur[idx], sel.group, rec.delta);
    brier[idx] = obj.brier(cur[idx].values());
    rec.brier_after = brier[idx];
    rec.group = std::move(sel.group);
    res.trace.push_back(std::move(rec));

    (idx == 0 ? res.t1 : res.t2) += 1;
    ++t;
    mass = disagreement_mass(cur[0], cur[1], eps, mu);
  }

  res.f1_final = std::move(cur[0]);
  res.f2_final = std::move(cur[1]);
  res.brier1_final = brier[0];
  res.brier2_final = brier[1];
  res.disagreement_final = mass;
  return res;
}

ReconcileResult reconcile(const Predictor& f1, const Predictor& f2, const Dataset& d,
                          const ReconcileParams& params) {
  return reconcile(f1, f2, LabelObjective(d), params);
}

}  // namespace recon
