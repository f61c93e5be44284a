#include "reconcile/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "random.hpp"

namespace recon::synth {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Piecewise-constant fit: rows are ordered by `feature`, cut into bins of
// `bin_rows` consecutive rows, and every row in a bin gets the mean label of
// the bin's training rows (or the global training mean when it has none).
std::vector<double> fit_binned(const std::vector<double>& feature, std::span<const double> labels,
                               const std::vector<bool>& train, std::size_t bin_rows) {
  const std::size_t n = feature.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return feature[a] < feature[b]; });

  double global_sum = 0.0;
  std::size_t global_n = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (train[i]) {
      global_sum += labels[i];
      ++global_n;
    }
  }
  const double global_mean = global_n > 0 ? global_sum / static_cast<double>(global_n) : 0.5;

  std::vector<double> out(n, global_mean);
  bin_rows = std::max<std::size_t>(bin_rows, 1);
  for (std::size_t start = 0; start < n; start += bin_rows) {
    const std::size_t end = std::min(n, start + bin_rows);
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t k = start; k < end; ++k) {
      if (train[order[k]]) {
        s += labels[order[k]];
        ++c;
      }
    }
    const double v = c > 0 ? s / static_cast<double>(c) : global_mean;
    for (std::size_t k = start; k < end; ++k) out[order[k]] = v;
  }
  return out;
}

ModelPair attempt_pair(const Predictor& f_star, const Dataset& d, const PairSpec& spec, std::mt19937_64& rng) {
  const std::size_t n = f_star.size();
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> a(n), b(n);

  switch (spec.strategy) {
    case PairStrategy::perturb_regions: {
      const double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = clamp01(f_star[i] + spec.noise_sd * noise(rng));
        b[i] = clamp01(f_star[i] + spec.noise_sd * noise(rng));
        if (unit(rng) < spec.region_mass) b[i] = clamp01(b[i] + sign * spec.shift);
      }
      break;
    }
    case PairStrategy::disjoint_rows: {
      std::vector<bool> half(n);
      for (std::size_t i = 0; i < n; ++i) half[i] = unit(rng) < 0.5;
      std::vector<bool> other(n);
      for (std::size_t i = 0; i < n; ++i) other[i] = !half[i];
      const std::vector<double> feature(f_star.values().begin(), f_star.values().end());
      a = fit_binned(feature, d.labels(), half, 2 * spec.rows_per_bin);
      b = fit_binned(feature, d.labels(), other, 2 * spec.rows_per_bin);
      break;
    }
    case PairStrategy::disjoint_features: {
      std::vector<double> view_a(n), view_b(n);
      for (std::size_t i = 0; i < n; ++i) {
        view_a[i] = f_star[i] + spec.view_noise_sd * noise(rng);
        view_b[i] = f_star[i] + spec.view_noise_sd * noise(rng);
      }
      const std::vector<bool> all(n, true);
      a = fit_binned(view_a, d.labels(), all, spec.rows_per_bin);
      b = fit_binned(view_b, d.labels(), all, spec.rows_per_bin);
      break;
    }
  }
  return {Predictor(std::move(a)), Predictor(std::move(b)), 1};
}

}  // namespace

GroundTruth gen_ground_truth(std::size_t n, std::uint64_t seed, const TruthPrior& prior) {
  if (n == 0) throw ParameterError("ground truth needs at least one row");
  auto rng = detail::make_rng(seed, detail::kGroundTruth);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> f(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (prior.kind) {
      case TruthPrior::Kind::uniform: f[i] = prior.lo + (prior.hi - prior.lo) * unit(rng); break;
      case TruthPrior::Kind::constant: f[i] = prior.value; break;
      case TruthPrior::Kind::two_point: f[i] = unit(rng) < 0.5 ? prior.lo : prior.hi; break;
    }
    f[i] = clamp01(f[i]);
    y[i] = unit(rng) < f[i] ? 1.0 : 0.0;
  }
  return {Predictor(std::move(f)), Dataset(std::move(y))};
}

const char* to_string(PairStrategy s) {
  switch (s) {
    case PairStrategy::perturb_regions: return "perturb_regions";
    case PairStrategy::disjoint_rows: return "disjoint_rows";
    case PairStrategy::disjoint_features: return "disjoint_features";
  }
  return "?";
}

bool admissible(const Predictor& f1, const Predictor& f2, const Dataset& d, const PairSpec& spec) {
  const double gap = std::fabs(brier_score(f1, d) - brier_score(f2, d));
  const double mass = disagreement_mass(f1, f2, spec.dis_epsilon, d.measure());
  return gap <= spec.max_brier_gap && mass >= spec.min_disagreement_mass;
}

ModelPair gen_model_pair(const Predictor& f_star, const Dataset& d, const PairSpec& spec) {
  if (f_star.size() != d.size()) throw AlignmentError("ground truth and dataset differ in length");
  if (!(spec.max_brier_gap > 0.0 && spec.min_disagreement_mass > 0.0 && spec.dis_epsilon > 0.0)) {
    throw ParameterError("pair admission thresholds must be positive");
  }
  double last_gap = 0.0;
  double last_mass = 0.0;
  for (int attempt = 0; attempt < spec.max_attempts; ++attempt) {
    auto rng = detail::make_rng(spec.seed, detail::kPairAttempt + 1000ULL * static_cast<std::uint64_t>(attempt));
    auto pair = attempt_pair(f_star, d, spec, rng);
    pair.attempts = attempt + 1;
    if (admissible(pair.f1, pair.f2, d, spec)) return pair;
    last_gap = std::fabs(brier_score(pair.f1, d) - brier_score(pair.f2, d));
    last_mass = disagreement_mass(pair.f1, pair.f2, spec.dis_epsilon, d.measure());
  }
  throw GenerationError(fmt::format(
      "{}: no admissible pair after {} attempts (last Brier gap {:.4f} vs max {}, disagreement mass {:.4f} vs min {})",
      to_string(spec.strategy), spec.max_attempts, last_gap, spec.max_brier_gap, last_mass,
      spec.min_disagreement_mass));
}

Predictor gen_random_predictor(std::size_t n, Interval range, std::uint64_t seed) {
  auto rng = detail::make_rng(seed, detail::kRandomPredictor);
  std::uniform_real_distribution<double> u(range.lo, range.hi);
  std::vector<double> v(n);
  for (auto& x : v) x = range.clamp(u(rng));
  return Predictor(std::move(v), range);
}

ModelSet gen_model_class(const Predictor& f_star, std::size_t k, std::uint64_t seed, double noise_sd,
                         double region_mass, double shift) {
  auto rng = detail::make_rng(seed, detail::kModelClass);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ModelSet ms;
  for (std::size_t j = 0; j < k; ++j) {
    const double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
    std::vector<double> v(f_star.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = clamp01(f_star[i] + noise_sd * noise(rng));
      if (unit(rng) < region_mass) v[i] = clamp01(v[i] + sign * shift);
    }
    ms.add(Predictor(std::move(v)), fmt::format("model_{}", j));
  }
  return ms;
}

SyntheticCausal gen_synthetic_causal(std::size_t n_cells, std::size_t units_per_cell, const EffectPrior& prior,
                                     std::uint64_t seed) {
  if (n_cells == 0 || units_per_cell == 0) throw ParameterError("need at least one cell and one unit per cell");
  auto rng = detail::make_rng(seed, detail::kCausal);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::size_t> cell;
  std::vector<double> y;
  std::vector<bool> t;
  std::vector<double> tau(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    tau[c] = prior.kind == EffectPrior::Kind::constant ? prior.lo : prior.lo + (prior.hi - prior.lo) * unit(rng);
    tau[c] = std::clamp(tau[c], -0.9, 0.9);
    const double lo = std::max(0.05, 0.05 - tau[c]);
    const double hi = std::min(0.95, 0.95 - tau[c]);
    const double base = lo + (hi - lo) * unit(rng);

    std::vector<bool> treated(units_per_cell, false);
    std::fill(treated.begin(), treated.begin() + static_cast<std::ptrdiff_t>(units_per_cell / 2), true);
    std::shuffle(treated.begin(), treated.end(), rng);
    for (std::size_t u = 0; u < units_per_cell; ++u) {
      const double p = treated[u] ? base + tau[c] : base;
      cell.push_back(c);
      t.push_back(treated[u]);
      y.push_back(unit(rng) < p ? 1.0 : 0.0);
    }
  }
  return {CausalDataset(std::move(cell), std::move(y), std::move(t), n_cells), std::move(tau)};
}

std::pair<CateEstimatorVector, CateEstimatorVector> gen_estimator_pair(const std::vector<double>& tau,
                                                                       std::size_t n_disagree, double shift,
                                                                       double noise_sd, std::uint64_t seed) {
  if (n_disagree > tau.size()) throw ParameterError("more disagreeing cells than cells");
  auto rng = detail::make_rng(seed, detail::kEstimators);
  std::normal_distribution<double> noise(0.0, 1.0);
  CateEstimatorVector a{{}, {-1.0, 1.0}, "estimator_a"};
  CateEstimatorVector b{{}, {-1.0, 1.0}, "estimator_b"};
  for (double v : tau) {
    a.values.push_back(std::clamp(v + noise_sd * noise(rng), -1.0, 1.0));
    b.values.push_back(std::clamp(v + noise_sd * noise(rng), -1.0, 1.0));
  }
  std::vector<std::size_t> cells(tau.size());
  std::iota(cells.begin(), cells.end(), 0);
  std::shuffle(cells.begin(), cells.end(), rng);
  for (std::size_t k = 0; k < n_disagree; ++k) {
    auto& v = b.values[cells[k]];
    v = std::clamp(v + shift, -1.0, 1.0);
  }
  return {std::move(a), std::move(b)};
}

}  // namespace recon::synth
