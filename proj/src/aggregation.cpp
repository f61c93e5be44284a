#include "reconcile/aggregation.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "random.hpp"
#include "reconcile/synth.hpp"

namespace recon {

ModelSet::ModelSet(std::vector<Predictor> models, std::vector<std::string> labels) {
  if (labels.empty()) {
    for (std::size_t i = 0; i < models.size(); ++i) labels.push_back(fmt::format("model_{}", i));
  }
  if (labels.size() != models.size()) throw AlignmentError("model set labels do not match the model count");
  for (std::size_t i = 0; i < models.size(); ++i) add(std::move(models[i]), std::move(labels[i]));
}

void ModelSet::add(Predictor model, std::string label) {
  if (!models_.empty()) {
    if (model.size() != rows()) {
      throw AlignmentError(fmt::format("model '{}' has {} rows, expected {}", label, model.size(), rows()));
    }
    if (!(model.range() == models_.front().range())) {
      throw ParameterError(fmt::format("model '{}' declares a different output range", label));
    }
  }
  models_.push_back(std::move(model));
  labels_.push_back(std::move(label));
}

int SequentialResult::total_rounds() const {
  int total = 0;
  for (const auto& s : stages) total += s.rounds();
  return total;
}

const char* to_string(AggregationMethod m) {
  switch (m) {
    case AggregationMethod::mode: return "mode";
    case AggregationMethod::mean: return "mean";
    case AggregationMethod::randomized: return "randomized";
    case AggregationMethod::random_select: return "random_select";
    case AggregationMethod::sequential_reconcile: return "sequential_reconcile";
  }
  return "?";
}

AggregationMethod parse_aggregation_method(const std::string& s) {
  for (auto m : {AggregationMethod::mode, AggregationMethod::mean, AggregationMethod::randomized,
                 AggregationMethod::random_select, AggregationMethod::sequential_reconcile}) {
    if (s == to_string(m)) return m;
  }
  throw ParameterError(fmt::format("unknown aggregation method '{}'", s));
}

namespace {

void require_nonempty(const ModelSet& ms) {
  if (ms.size() == 0) throw ParameterError("model set is empty");
}

}  // namespace

Predictor mode_aggregate(const ModelSet& ms, double threshold) {
  require_nonempty(ms);
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ParameterError(fmt::format("threshold must lie in (0, 1), got {}", threshold));
  }
  const std::size_t n = ms.rows();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ones = 0;
    for (const auto& f : ms.models()) ones += f[i] >= threshold ? 1 : 0;
    out[i] = 2 * ones >= ms.size() ? 1.0 : 0.0;
  }
  return Predictor(std::move(out), ms[0].range());
}

Predictor mean_aggregate(const ModelSet& ms) {
  require_nonempty(ms);
  const std::size_t n = ms.rows();
  const auto range = ms[0].range();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& f : ms.models()) s += f[i];
    out[i] = range.clamp(s / static_cast<double>(ms.size()));
  }
  return Predictor(std::move(out), range);
}

Predictor randomized_prediction(const ModelSet& ms, std::uint64_t seed) {
  require_nonempty(ms);
  auto rng = detail::make_rng(seed, detail::kRandomizedPrediction);
  std::uniform_int_distribution<std::size_t> pick(0, ms.size() - 1);
  std::vector<double> out(ms.rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ms[pick(rng)][i];
  return Predictor(std::move(out), ms[0].range());
}

Predictor random_model_select(const ModelSet& ms, std::uint64_t seed) {
  require_nonempty(ms);
  auto rng = detail::make_rng(seed, detail::kRandomSelect);
  std::uniform_int_distribution<std::size_t> pick(0, ms.size() - 1);
  return ms[pick(rng)];
}

SequentialResult sequential_reconcile(const ModelSet& ms, const Dataset& d, const ReconcileParams& params,
                                      const AggregationConfig& cfg) {
  if (ms.size() < 2) throw ParameterError("sequential reconcile needs at least two models");
  params.validate();

  SequentialResult out;
  out.order.resize(ms.size());
  std::iota(out.order.begin(), out.order.end(), 0);
  if (cfg.order_policy == OrderPolicy::shuffled) {
    auto rng = detail::make_rng(cfg.seed, detail::kSequentialOrder);
    std::shuffle(out.order.begin(), out.order.end(), rng);
  }
  auto pick_rng = detail::make_rng(cfg.seed, detail::kSequentialPick);

  Predictor survivor = ms[out.order[0]];
  for (std::size_t j = 1; j < out.order.size(); ++j) {
    auto res = reconcile(survivor, ms[out.order[j]], d, params);
    out.round_cap = out.round_cap || !res.converged();
    int pick = 1;
    if (cfg.pick_policy == PickPolicy::lower_brier) {
      pick = res.brier2_final < res.brier1_final ? 2 : 1;
    } else {
      pick = std::bernoulli_distribution(0.5)(pick_rng) ? 2 : 1;
    }
    survivor = pick == 1 ? res.f1_final : res.f2_final;
    out.picked.push_back(pick);
    out.survivors.push_back(survivor);
    out.stages.push_back(std::move(res));
  }
  out.survivor = std::move(survivor);
  return out;
}

Predictor aggregate(const ModelSet& ms, const Dataset& d, const ReconcileParams& params,
                    const AggregationConfig& cfg) {
  switch (cfg.method) {
    case AggregationMethod::mode: return mode_aggregate(ms, cfg.threshold);
    case AggregationMethod::mean: return mean_aggregate(ms);
    case AggregationMethod::randomized: return randomized_prediction(ms, cfg.seed);
    case AggregationMethod::random_select: return random_model_select(ms, cfg.seed);
    case AggregationMethod::sequential_reconcile:
      if (ms.size() == 1) return ms[0];
      return sequential_reconcile(ms, d, params, cfg).survivor;
  }
  throw ParameterError("unknown aggregation method");
}

std::vector<SweepRow> robustness_sweep(const ModelSet& ms, const Dataset& d, const ReconcileParams& params,
                                       const std::vector<std::size_t>& k_range, std::uint64_t seed) {
  require_nonempty(ms);
  std::vector<SweepRow> rows;
  for (std::size_t k : k_range) {
    if (k > ms.size()) throw ParameterError(fmt::format("cannot replace {} of {} models", k, ms.size()));

    std::vector<std::size_t> idx(ms.size());
    std::iota(idx.begin(), idx.end(), 0);
    auto rng = detail::make_rng(seed + k, detail::kSweepReplace);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<Predictor> models = ms.models();
    for (std::size_t j = 0; j < k; ++j) {
      models[idx[j]] = synth::gen_random_predictor(ms.rows(), ms[0].range(), seed * 1000003ULL + k * 131ULL + j);
    }
    ModelSet corrupted(std::move(models), ms.labels());

    AggregationConfig cfg;
    cfg.seed = seed + k;
    const double mode_mse = brier_score(mode_aggregate(corrupted, cfg.threshold), d);
    const double mean_mse = brier_score(mean_aggregate(corrupted), d);
    const double seq_mse = brier_score(aggregate(corrupted, d, params, cfg), d);
    rows.push_back({k, "mode", mode_mse, seed});
    rows.push_back({k, "mean", mean_mse, seed});
    rows.push_back({k, "sequential_reconcile", seq_mse, seed});
  }
  return rows;
}

}  // namespace recon
