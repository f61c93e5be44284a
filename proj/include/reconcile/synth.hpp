#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "reconcile/aggregation.hpp"
#include "reconcile/cate.hpp"
#include "reconcile/core.hpp"

namespace recon::synth {

// Prior over the ground-truth probabilities f*(x).
struct TruthPrior {
  enum class Kind { uniform, constant, two_point } kind = Kind::uniform;
  double value = 0.5;  // constant value
  double lo = 0.1;     // two-point support (also uniform bounds when kind == uniform)
  double hi = 0.9;

  static TruthPrior uniform01() { return {Kind::uniform, 0.5, 0.0, 1.0}; }
  static TruthPrior constant(double v) { return {Kind::constant, v, 0.0, 1.0}; }
  static TruthPrior two_point(double lo, double hi) { return {Kind::two_point, 0.5, lo, hi}; }
};

struct GroundTruth {
  Predictor f_star;
  Dataset data;
};

GroundTruth gen_ground_truth(std::size_t n, std::uint64_t seed, const TruthPrior& prior = TruthPrior::uniform01());

enum class PairStrategy { perturb_regions, disjoint_rows, disjoint_features };

const char* to_string(PairStrategy s);

struct PairSpec {
  PairStrategy strategy = PairStrategy::perturb_regions;
  double max_brier_gap = 0.05;
  double min_disagreement_mass = 0.05;
  double dis_epsilon = 0.2;
  std::uint64_t seed = 0;

  // perturb_regions
  double noise_sd = 0.05;
  double region_mass = 0.1;
  double shift = 0.5;
  // disjoint_rows / disjoint_features: rows per bin of the piecewise-constant fit
  std::size_t rows_per_bin = 10;
  double view_noise_sd = 0.15;

  int max_attempts = 100;
};

struct ModelPair {
  Predictor f1;
  Predictor f2;
  int attempts = 1;
};

// Both returned models satisfy |B1 - B2| <= max_brier_gap and
// mass(U_eps) >= min_disagreement_mass, re-checked after generation.
ModelPair gen_model_pair(const Predictor& f_star, const Dataset& d, const PairSpec& spec);

bool admissible(const Predictor& f1, const Predictor& f2, const Dataset& d, const PairSpec& spec);

Predictor gen_random_predictor(std::size_t n, Interval range, std::uint64_t seed);

// k noisy copies of f*, each with its own shifted region so that pairs
// disagree on roughly `region_mass` of the rows.
ModelSet gen_model_class(const Predictor& f_star, std::size_t k, std::uint64_t seed, double noise_sd = 0.05,
                         double region_mass = 0.1, double shift = 0.5);

struct EffectPrior {
  enum class Kind { constant, uniform } kind = Kind::uniform;
  double lo = -0.3;
  double hi = 0.3;

  static EffectPrior constant(double v) { return {Kind::constant, v, v}; }
  static EffectPrior uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }
};

struct SyntheticCausal {
  CausalDataset data;
  std::vector<double> true_tau;
};

// Treatment is assigned by complete randomization inside each cell: exactly
// floor(units/2) treated units per cell.
SyntheticCausal gen_synthetic_causal(std::size_t n_cells, std::size_t units_per_cell, const EffectPrior& prior,
                                     std::uint64_t seed);

// Two noisy estimators of `tau` that disagree by `shift` on `n_disagree` cells.
std::pair<CateEstimatorVector, CateEstimatorVector> gen_estimator_pair(const std::vector<double>& tau,
                                                                       std::size_t n_disagree, double shift,
                                                                       double noise_sd, std::uint64_t seed);

}  // namespace recon::synth
