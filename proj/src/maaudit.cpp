#include "reconcile/maaudit.hpp"

#include <algorithm>
#include <cmath>

namespace recon {

namespace {

// Slack for comparing two floating evaluations of the same mean.
constexpr double kIdentityTolerance = 1e-12;

double gap_of(std::span<const double> values, const Dataset& d, const GroupIndicator& g) {
  const auto& mu = d.measure();
  const double diff = mu.mean(values, g) - mu.mean(d.labels(), g);
  return diff * diff;
}

}  // namespace

double ma_gap(const Predictor& f, const Dataset& d, const GroupIndicator& g) {
  if (f.size() != d.size()) throw AlignmentError("predictor and dataset differ in length");
  return gap_of(f.values(), d, g);
}

MaAuditReport audit_trace(const ReconcileResult& res, const Dataset& d, double beta) {
  MaAuditReport rep;
  rep.beta = beta;
  if (res.trace.empty()) return rep;

  for (const auto& r : res.trace) {
    for (int model : {1, 2}) {
      MaGroupAudit a;
      a.round = r.t;
      a.direction = r.direction;
      a.patched_model = r.patched_model;
      a.audited_model = model;
      a.mass = r.group_mass;
      a.gap = ma_gap(model == 1 ? res.f1_final : res.f2_final, d, r.group);
      a.bound = beta / r.group_mass;
      a.violated = a.gap > a.bound;
      rep.max_excess = std::max(rep.max_excess, a.gap - a.bound);
      rep.violations += a.violated ? 1 : 0;
      rep.per_group.push_back(a);
    }
  }

  const double m = static_cast<double>(res.grid);
  Predictor cur1 = res.f1_initial;
  Predictor cur2 = res.f2_initial;
  for (const auto& r : res.trace) {
    Predictor& cur = r.patched_model == 1 ? cur1 : cur2;
    const auto raw = patch_unprojected(cur.values(), r.group, r.delta);
    cur = patch(cur, r.group, r.delta);

    PostPatchCheck c;
    c.round = r.t;
    c.gap = gap_of(raw, d, r.group);
    c.expected = (r.delta_raw - r.delta) * (r.delta_raw - r.delta);
    c.residual_bound = 1.0 / (4.0 * m * m);
    c.gap_projected = gap_of(cur.values(), d, r.group);
    c.holds = std::fabs(c.gap - c.expected) <= kIdentityTolerance && c.expected <= c.residual_bound;
    rep.post_patch_ok = rep.post_patch_ok && c.holds;
    rep.post_patch.push_back(c);
  }
  rep.replay_matches = cur1 == res.f1_final && cur2 == res.f2_final;
  return rep;
}

}  // namespace recon
