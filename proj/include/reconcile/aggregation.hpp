#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reconcile/core.hpp"
#include "reconcile/engine.hpp"

namespace recon {

// The class M of competing models, all aligned to one dataset.
class ModelSet {
 public:
  ModelSet() = default;
  ModelSet(std::vector<Predictor> models, std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return models_.size(); }
  std::size_t rows() const noexcept { return models_.empty() ? 0 : models_.front().size(); }
  const Predictor& operator[](std::size_t i) const { return models_[i]; }
  const std::vector<Predictor>& models() const noexcept { return models_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  void add(Predictor model, std::string label);

 private:
  std::vector<Predictor> models_;
  std::vector<std::string> labels_;
};

enum class AggregationMethod { mode, mean, randomized, random_select, sequential_reconcile };
enum class PickPolicy { random, lower_brier };
enum class OrderPolicy { given, shuffled };

const char* to_string(AggregationMethod m);
AggregationMethod parse_aggregation_method(const std::string& s);

struct AggregationConfig {
  AggregationMethod method = AggregationMethod::sequential_reconcile;
  double threshold = 0.5;
  std::uint64_t seed = 0;
  PickPolicy pick_policy = PickPolicy::lower_brier;
  OrderPolicy order_policy = OrderPolicy::shuffled;
};

// Per-row majority vote of thresholded predictions; ties vote 1.
Predictor mode_aggregate(const ModelSet& ms, double threshold = 0.5);
Predictor mean_aggregate(const ModelSet& ms);
Predictor randomized_prediction(const ModelSet& ms, std::uint64_t seed);
Predictor random_model_select(const ModelSet& ms, std::uint64_t seed);

struct SequentialResult {
  Predictor survivor;
  std::vector<std::size_t> order;         // indices into the input set, processing order
  std::vector<ReconcileResult> stages;    // one per reconcile call, |ms| - 1 of them
  std::vector<Predictor> survivors;       // survivor after each stage
  std::vector<int> picked;                // 1 = carried survivor, 2 = newly drawn model
  bool round_cap = false;

  int total_rounds() const;
};

SequentialResult sequential_reconcile(const ModelSet& ms, const Dataset& d, const ReconcileParams& params,
                                      const AggregationConfig& cfg);

// Dispatches on cfg.method.
Predictor aggregate(const ModelSet& ms, const Dataset& d, const ReconcileParams& params,
                    const AggregationConfig& cfg);

struct SweepRow {
  std::size_t k = 0;
  std::string method;
  double mse = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

// For each k, replaces k members (seeded choice) with i.i.d. uniform random
// predictors and scores mode, mean and sequential-Reconcile aggregation.
std::vector<SweepRow> robustness_sweep(const ModelSet& ms, const Dataset& d, const ReconcileParams& params,
                                       const std::vector<std::size_t>& k_range, std::uint64_t seed);

}  // namespace recon
