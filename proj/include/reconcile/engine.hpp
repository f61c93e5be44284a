#pragma once

#include <optional>
#include <span>
#include <vector>

#include "reconcile/core.hpp"

namespace recon {

enum class Direction { greater, less };

inline char symbol(Direction d) noexcept { return d == Direction::greater ? '>' : '<'; }

struct ReconcileParams {
  double alpha = 0.05;
  double epsilon = 0.2;
  std::optional<int> grid;          // m; defaults to ceil(2 / (sqrt(alpha) * epsilon))
  std::optional<long> max_rounds;   // defaults to the round bound + 1

  void validate() const;
  int grid_size() const;
};

int default_grid_size(double alpha, double epsilon);

// (B1 + B2) * 16 / (alpha * eps^2), the bound on total rounds.
double round_bound(double brier1, double brier2, double alpha, double epsilon);

// alpha * eps^2 / 16, the guaranteed Brier improvement of every round.
double per_round_improvement(double alpha, double epsilon);

struct RoundRecord {
  int t = 0;
  int patched_model = 1;
  Direction direction = Direction::greater;
  GroupIndicator group;
  double group_mass = 0.0;
  double delta_raw = 0.0;
  double delta = 0.0;
  double brier_before = 0.0;
  double brier_after = 0.0;
  double disagreement_mass_before = 0.0;
};

enum class Termination { converged, round_cap };

struct ReconcileResult {
  Predictor f1_initial;
  Predictor f2_initial;
  Predictor f1_final;
  Predictor f2_final;
  int t1 = 0;
  int t2 = 0;
  std::vector<RoundRecord> trace;
  Termination terminated_by = Termination::converged;

  double alpha = 0.0;
  double epsilon = 0.0;
  int grid = 0;
  long max_rounds = 0;
  double brier1_initial = 0.0;
  double brier2_initial = 0.0;
  double brier1_final = 0.0;
  double brier2_final = 0.0;
  double disagreement_initial = 0.0;
  double disagreement_final = 0.0;

  int rounds() const noexcept { return t1 + t2; }
  bool converged() const noexcept { return terminated_by == Termination::converged; }
};

// The distribution and target a reconciliation runs against. The prediction
// setting targets labels; the unit-level CATE variant targets
// treatment-conditional mean differences.
class Objective {
 public:
  explicit Objective(EmpiricalMeasure measure) : measure_(std::move(measure)) {}
  virtual ~Objective() = default;

  const EmpiricalMeasure& measure() const noexcept { return measure_; }
  std::size_t size() const noexcept { return measure_.size(); }

  // v* for a nonempty group; `round` is only used for error reporting.
  virtual double target_mean(const GroupIndicator& g, int round) const = 0;
  virtual double brier(std::span<const double> values) const = 0;

 private:
  EmpiricalMeasure measure_;
};

class LabelObjective final : public Objective {
 public:
  explicit LabelObjective(const Dataset& d) : Objective(d.measure()), labels_(d.labels().begin(), d.labels().end()) {}

  double target_mean(const GroupIndicator& g, int) const override { return measure().mean(labels_, g); }
  double brier(std::span<const double> values) const override {
    return measure().mean_squared_error(values, labels_);
  }

 private:
  std::vector<double> labels_;
};

struct Selection {
  int model = 1;
  Direction direction = Direction::greater;
  GroupIndicator group;
  double score = 0.0;
};

Selection select_update(const Predictor& f1, const Predictor& f2, const Objective& obj, double eps, int round = 0);
Selection select_update(const Predictor& f1, const Predictor& f2, const Dataset& d, double eps);

ReconcileResult reconcile(const Predictor& f1, const Predictor& f2, const Objective& obj,
                          const ReconcileParams& params);
ReconcileResult reconcile(const Predictor& f1, const Predictor& f2, const Dataset& d,
                          const ReconcileParams& params);

}  // namespace recon
