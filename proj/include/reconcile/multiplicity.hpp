#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "reconcile/aggregation.hpp"
#include "reconcile/engine.hpp"

namespace recon {

// min/max/mean and population standard deviation of a sample.
struct SummaryStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

SummaryStats summarize(std::span<const double> xs);

// Mean over rows of the max-min spread across models.
double ambiguity(const ModelSet& ms);
// Max over model pairs of the mean absolute difference.
double discrepancy(const ModelSet& ms);
// Per-row population variance across models, summarized over rows.
SummaryStats prediction_variance_stats(const ModelSet& ms);

struct PairMass {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

std::vector<PairMass> pairwise_disagreement(const ModelSet& ms, double eps,
                                            const EmpiricalMeasure* measure = nullptr);
SummaryStats pairwise_disagreement_stats(const ModelSet& ms, double eps);

struct MultiplicityReport {
  double ambiguity = 0.0;
  std::optional<double> discrepancy;  // needs two models
  SummaryStats variance_stats;
  std::optional<SummaryStats> disagreement_stats;
  double epsilon_used = 0.0;
};

MultiplicityReport multiplicity_report(const ModelSet& ms, double eps);

enum class SetMethod { a, b, c, d };

SetMethod parse_set_method(char c);

struct ReconciledSet {
  ModelSet models;
  std::vector<ReconcileResult> runs;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // input indices per run, methods a-c
  bool round_cap = false;
};

// a: both outputs of every pair; b: first output per pair; c: |ms| members
// sampled without replacement from a; d: the sequential chain's survivors
// plus the partner output of the final stage.
ReconciledSet build_reconciled_set(const ModelSet& ms, const Dataset& d, const ReconcileParams& params,
                                   SetMethod method, std::uint64_t seed);

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p = 1.0;
  double mean_diff = 0.0;
};

// Paired two-sided t-test on xs - ys.
TTestResult paired_t_test(std::span<const double> xs, std::span<const double> ys);

}  // namespace recon
