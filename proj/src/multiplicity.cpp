#include "reconcile/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>
#include <fmt/format.h>

#include "random.hpp"

namespace recon {

namespace {

void require_models(const ModelSet& ms, std::size_t at_least) {
  if (ms.size() < at_least) {
    throw ParameterError(fmt::format("need at least {} model(s), got {}", at_least, ms.size()));
  }
}

}  // namespace

SummaryStats summarize(std::span<const double> xs) {
  SummaryStats s;
  s.count = xs.size();
  if (xs.empty()) return s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return s;
}

double ambiguity(const ModelSet& ms) {
  require_models(ms, 1);
  const std::size_t n = ms.rows();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = ms[0][i];
    double hi = ms[0][i];
    for (const auto& f : ms.models()) {
      lo = std::min(lo, f[i]);
      hi = std::max(hi, f[i]);
    }
    total += hi - lo;
  }
  return total / static_cast<double>(n);
}

double discrepancy(const ModelSet& ms) {
  require_models(ms, 2);
  const std::size_t n = ms.rows();
  double best = 0.0;
  for (std::size_t a = 0; a < ms.size(); ++a) {
    for (std::size_t b = a + 1; b < ms.size(); ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::fabs(ms[a][i] - ms[b][i]);
      best = std::max(best, s / static_cast<double>(n));
    }
  }
  return best;
}

SummaryStats prediction_variance_stats(const ModelSet& ms) {
  require_models(ms, 1);
  const std::size_t n = ms.rows();
  const double k = static_cast<double>(ms.size());
  std::vector<double> var(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (const auto& f : ms.models()) mean += f[i];
    mean /= k;
    double ss = 0.0;
    for (const auto& f : ms.models()) ss += (f[i] - mean) * (f[i] - mean);
    var[i] = ss / k;
  }
  return summarize(var);
}

std::vector<PairMass> pairwise_disagreement(const ModelSet& ms, double eps, const EmpiricalMeasure* measure) {
  require_models(ms, 2);
  const EmpiricalMeasure uniform(ms.rows());
  const EmpiricalMeasure& mu = measure ? *measure : uniform;
  std::vector<PairMass> out;
  for (std::size_t a = 0; a < ms.size(); ++a) {
    for (std::size_t b = a + 1; b < ms.size(); ++b) {
      out.push_back({a, b, disagreement_mass(ms[a], ms[b], eps, mu)});
    }
  }
  return out;
}

SummaryStats pairwise_disagreement_stats(const ModelSet& ms, double eps) {
  std::vector<double> masses;
  for (const auto& p : pairwise_disagreement(ms, eps)) masses.push_back(p.mass);
  return summarize(masses);
}

MultiplicityReport multiplicity_report(const ModelSet& ms, double eps) {
  MultiplicityReport r;
  r.epsilon_used = eps;
  r.ambiguity = ambiguity(ms);
  r.variance_stats = prediction_variance_stats(ms);
  if (ms.size() >= 2) {
    r.discrepancy = discrepancy(ms);
    r.disagreement_stats = pairwise_disagreement_stats(ms, eps);
  }
  return r;
}

SetMethod parse_set_method(char c) {
  switch (c) {
    case 'a': return SetMethod::a;
    case 'b': return SetMethod::b;
    case 'c': return SetMethod::c;
    case 'd': return SetMethod::d;
    default: throw ParameterError(fmt::format("unknown set construction method '{}'", c));
  }
}

ReconciledSet build_reconciled_set(const ModelSet& ms, const Dataset& d, const ReconcileParams& params,
                                   SetMethod method, std::uint64_t seed) {
  require_models(ms, 2);
  ReconciledSet out;

  if (method == SetMethod::d) {
    AggregationConfig cfg;
    cfg.seed = seed;
    cfg.pick_policy = PickPolicy::random;
    cfg.order_policy = OrderPolicy::shuffled;
    auto seq = sequential_reconcile(ms, d, params, cfg);
    for (std::size_t s = 0; s < seq.stages.size(); ++s) {
      out.models.add(seq.survivors[s], fmt::format("chain_{}", s));
    }
    const auto& last = seq.stages.back();
    out.models.add(seq.picked.back() == 1 ? last.f2_final : last.f1_final,
                   fmt::format("chain_{}_partner", seq.stages.size() - 1));
    out.round_cap = seq.round_cap;
    out.runs = std::move(seq.stages);
    return out;
  }

  ModelSet both;
  for (std::size_t a = 0; a < ms.size(); ++a) {
    for (std::size_t b = a + 1; b < ms.size(); ++b) {
      auto res = reconcile(ms[a], ms[b], d, params);
      out.round_cap = out.round_cap || !res.converged();
      const auto& la = ms.labels()[a];
      const auto& lb = ms.labels()[b];
      both.add(res.f1_final, fmt::format("{}|{}:1", la, lb));
      both.add(res.f2_final, fmt::format("{}|{}:2", la, lb));
      out.pairs.emplace_back(a, b);
      out.runs.push_back(std::move(res));
    }
  }

  switch (method) {
    case SetMethod::a: out.models = std::move(both); break;
    case SetMethod::b:
      for (std::size_t k = 0; k < both.size(); k += 2) out.models.add(both[k], both.labels()[k]);
      break;
    case SetMethod::c: {
      std::vector<std::size_t> idx(both.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::vector<std::size_t> chosen;
      auto rng = detail::make_rng(seed, detail::kReconciledSetSample);
      std::sample(idx.begin(), idx.end(), std::back_inserter(chosen), ms.size(), rng);
      for (auto k : chosen) out.models.add(both[k], both.labels()[k]);
      break;
    }
    case SetMethod::d: break;
  }
  return out;
}

TTestResult paired_t_test(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw AlignmentError("paired t-test needs equal-length samples");
  const std::size_t n = xs.size();
  if (n < 2) throw DegenerateInputError("paired t-test needs at least two pairs");

  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = xs[i] - ys[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw DegenerateInputError("paired differences have zero variance");

  TTestResult r;
  r.mean_diff = mean;
  r.df = static_cast<int>(n - 1);
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const double nu = static_cast<double>(r.df);
  // Two-sided tail: P(|T| > t) = I_{nu/(nu+t^2)}(nu/2, 1/2).
  r.p = boost::math::ibeta(nu / 2.0, 0.5, nu / (nu + r.t * r.t));
  return r;
}

}  // namespace recon
