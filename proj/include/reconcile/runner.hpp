#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "reconcile/core.hpp"
#include "reconcile/engine.hpp"

namespace recon {

enum class Task { reconcile, seq, aggregate, metrics, cate, fairness, robustness, synth };

const char* to_string(Task t);
Task parse_task(const std::string& s);

enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitInput = 2, kExitRoundCap = 3 };

struct RunConfig {
  Task task = Task::reconcile;
  std::optional<double> alpha;    // 0.05 for prediction tasks, 0.01 for cate
  std::optional<double> epsilon;  // 0.2 for prediction tasks, 0.04 for cate
  std::uint64_t seed = 0;
  std::optional<Interval> range;  // [0,1] for prediction tasks, [-1,1] for cate
  std::filesystem::path labels;
  std::filesystem::path predictions;
  std::filesystem::path out = "out";
  int reps = 1;
  std::optional<std::array<double, 3>> split;
  std::optional<long> max_rounds;  // per reconcile call; defaults to the round bound + 1

  // Task-specific knobs.
  std::string method;                // aggregate: method name; metrics: set methods "abcd"; synth: pair strategy
  std::vector<std::string> models;   // prediction columns to use (default: first two / all)
  std::string minority = "minority"; // fairness: group_<name> column
  std::string majority;              // fairness: optional group_<name> column
  std::string weighting = "uniform"; // cate: uniform | by_cell_size
  std::vector<std::size_t> k_values; // robustness: default 0..|M|
  std::size_t n = 1000;              // synth: rows
  std::size_t n_models = 5;          // synth: model class size
  bool real_labels = false;          // labels are real-valued rather than binary

  double effective_alpha() const;
  double effective_epsilon() const;
  Interval effective_range() const;
  ReconcileParams params() const;
  void validate() const;
};

// Applies a recorded trace to new predictions: at each round the recorded
// direction's disagreement predicate is re-evaluated on the current new
// predictions and the recorded delta is added, then clamped.
std::pair<Predictor, Predictor> transfer_patches(const ReconcileResult& res, Predictor g1, Predictor g2);

// Hard-invariant failures of one run, each a readable sentence.
std::vector<std::string> check_guarantees(const ReconcileResult& res);

// Runs the configured task, writes its artifacts under config.out and
// returns an ExitCode. Errors are reported on stderr.
int run(const RunConfig& config);

}  // namespace recon
