#pragma once

#include <vector>

#include "reconcile/core.hpp"
#include "reconcile/engine.hpp"

namespace recon {

// (E[f - y | g])^2 under the dataset's measure.
double ma_gap(const Predictor& f, const Dataset& d, const GroupIndicator& g);

struct MaGroupAudit {
  int round = 0;
  Direction direction = Direction::greater;
  int patched_model = 1;
  int audited_model = 1;
  double mass = 0.0;
  double gap = 0.0;
  double bound = 0.0;  // beta / mass
  bool violated = false;
};

// State of the patched model right after round t's patch, before projection.
struct PostPatchCheck {
  int round = 0;
  double gap = 0.0;             // ma_gap of the unprojected patched model on g_t
  double expected = 0.0;        // (delta_raw - delta)^2
  double residual_bound = 0.0;  // 1 / (4 m^2)
  double gap_projected = 0.0;   // same gap after clamping to the range
  bool holds = true;
};

struct MaAuditReport {
  double beta = 0.0;
  std::vector<MaGroupAudit> per_group;  // two entries per round, one per final model
  double max_excess = 0.0;
  int violations = 0;
  std::vector<PostPatchCheck> post_patch;
  bool post_patch_ok = true;
  bool replay_matches = true;  // replayed finals equal the recorded ones
};

// Audits every recorded group against both final models and replays the
// trace to check the per-round post-patch identity. The trace must come from
// a label-targeted run on `d`.
MaAuditReport audit_trace(const ReconcileResult& res, const Dataset& d, double beta);

}  // namespace recon
