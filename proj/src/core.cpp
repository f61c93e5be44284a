#include "reconcile/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

namespace recon {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw AlignmentError(fmt::format("{}: length mismatch ({} vs {})", what, a, b));
  }
}

}  // namespace

GroupIndicator GroupIndicator::from_members(std::size_t n, std::span<const std::size_t> members) {
  std::vector<bool> mask(n, false);
  for (auto i : members) {
    if (i >= n) throw AlignmentError(fmt::format("group member {} out of range (n={})", i, n));
    mask[i] = true;
  }
  return GroupIndicator(std::move(mask));
}

std::size_t GroupIndicator::count() const noexcept {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), true));
}

std::vector<std::size_t> GroupIndicator::members() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    if (mask_[i]) out.push_back(i);
  }
  return out;
}

GroupIndicator GroupIndicator::complement() const {
  std::vector<bool> m(mask_.size());
  for (std::size_t i = 0; i < mask_.size(); ++i) m[i] = !mask_[i];
  return GroupIndicator(std::move(m));
}

Predictor::Predictor(std::vector<double> values, Interval range) : values_(std::move(values)), range_(range) {
  if (!(range_.lo <= range_.hi) || !std::isfinite(range_.lo) || !std::isfinite(range_.hi)) {
    throw ParameterError(fmt::format("invalid predictor range [{}, {}]", range_.lo, range_.hi));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v)) throw InputError(fmt::format("non-finite prediction at row {}", i));
    if (!range_.contains(v)) {
      throw InputError(fmt::format("prediction {} at row {} outside range [{}, {}]", v, i, range_.lo, range_.hi));
    }
  }
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> weights) : n_(weights.size()) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      throw ParameterError(fmt::format("invalid weight {} at row {}", weights[i], i));
    }
    total += weights[i];
  }
  if (!(total > 0.0)) throw ParameterError("weights sum to zero");
  for (auto& w : weights) w /= total;
  weights_ = std::move(weights);
}

double EmpiricalMeasure::mass(const GroupIndicator& g) const {
  require_same_size(g.size(), n_, "group mass");
  if (uniform()) {
    return n_ == 0 ? 0.0 : static_cast<double>(g.count()) / static_cast<double>(n_);
  }
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (g[i]) m += weights_[i];
  }
  return m;
}

double EmpiricalMeasure::mean(std::span<const double> values, const GroupIndicator& g) const {
  require_same_size(values.size(), n_, "conditional mean");
  require_same_size(g.size(), n_, "conditional mean");
  double sum = 0.0;
  double w = 0.0;
  if (uniform()) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (g[i]) {
        sum += values[i];
        ++c;
      }
    }
    if (c == 0) throw EmptyGroupError("conditional mean over an empty group");
    return sum / static_cast<double>(c);
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (g[i]) {
      sum += weights_[i] * values[i];
      w += weights_[i];
    }
  }
  if (!(w > 0.0)) throw EmptyGroupError("conditional mean over a zero-mass group");
  return sum / w;
}

double EmpiricalMeasure::mean(std::span<const double> values) const {
  return mean(values, GroupIndicator::all(n_));
}

double EmpiricalMeasure::mean_squared_error(std::span<const double> a, std::span<const double> b) const {
  return mean_squared_error(a, b, GroupIndicator::all(n_));
}

double EmpiricalMeasure::mean_squared_error(std::span<const double> a, std::span<const double> b,
                                            const GroupIndicator& g) const {
  require_same_size(a.size(), b.size(), "mean squared error");
  std::vector<double> sq(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - b[i];
    sq[i] = e * e;
  }
  return mean(sq, g);
}

Dataset::Dataset(std::vector<double> labels, LabelKind kind, std::vector<std::string> ids)
    : labels_(std::move(labels)), kind_(kind), ids_(std::move(ids)), measure_(labels_.size()) {
  if (labels_.empty()) throw InputError("dataset must contain at least one row");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const double y = labels_[i];
    if (!std::isfinite(y)) throw InputError(fmt::format("non-finite label at row {}", i));
    if (kind_ == LabelKind::binary && y != 0.0 && y != 1.0) {
      throw InputError(fmt::format("label {} at row {} is not binary", y, i));
    }
  }
  if (ids_.empty()) {
    ids_.reserve(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) ids_.push_back(std::to_string(i));
  }
  require_same_size(ids_.size(), labels_.size(), "dataset ids");
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!seen.insert(ids_[i]).second) throw InputError(fmt::format("duplicate id '{}' at row {}", ids_[i], i));
  }
}

void Dataset::set_weights(std::vector<double> weights) {
  require_same_size(weights.size(), labels_.size(), "dataset weights");
  measure_ = EmpiricalMeasure(std::move(weights));
}

void Dataset::add_group(const std::string& name, GroupIndicator g) {
  require_same_size(g.size(), labels_.size(), "dataset group");
  groups_.insert_or_assign(name, std::move(g));
}

const GroupIndicator& Dataset::group(const std::string& name) const {
  auto it = groups_.find(name);
  if (it == groups_.end()) throw InputError(fmt::format("unknown group '{}'", name));
  return it->second;
}

void Dataset::set_treatment(std::vector<bool> treatment) {
  require_same_size(treatment.size(), labels_.size(), "dataset treatment");
  treatment_ = std::move(treatment);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> y;
  std::vector<std::string> ids;
  std::vector<double> w;
  for (auto r : rows) {
    if (r >= size()) throw AlignmentError(fmt::format("subset row {} out of range", r));
    y.push_back(labels_[r]);
    ids.push_back(ids_[r]);
    w.push_back(measure_.weight(r));
  }
  Dataset out(std::move(y), kind_, std::move(ids));
  if (!measure_.uniform()) out.set_weights(std::move(w));
  for (const auto& [name, g] : groups_) {
    std::vector<bool> m;
    for (auto r : rows) m.push_back(g[r]);
    out.add_group(name, GroupIndicator(std::move(m)));
  }
  if (treatment_) {
    std::vector<bool> t;
    for (auto r : rows) t.push_back((*treatment_)[r]);
    out.set_treatment(std::move(t));
  }
  return out;
}

double brier_score(const Predictor& f, const Dataset& d) {
  require_same_size(f.size(), d.size(), "brier_score");
  return d.measure().mean_squared_error(f.values(), d.labels());
}

double restricted_brier(const Predictor& f, const Dataset& d, const GroupIndicator& p) {
  require_same_size(f.size(), d.size(), "restricted_brier");
  return d.measure().mean_squared_error(f.values(), d.labels(), p);
}

double group_mass(const GroupIndicator& g, const Dataset& d) { return d.measure().mass(g); }

DisagreementRegion disagreement_region(const Predictor& f1, const Predictor& f2, double eps) {
  if (!(eps > 0.0)) throw ParameterError(fmt::format("epsilon must be positive, got {}", eps));
  require_same_size(f1.size(), f2.size(), "disagreement_region");
  const std::size_t n = f1.size();
  std::vector<bool> u(n), gt(n), lt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = f1[i] - f2[i];
    gt[i] = diff > eps;
    lt[i] = -diff > eps;
    u[i] = gt[i] || lt[i];
  }
  return {GroupIndicator(std::move(u)), GroupIndicator(std::move(gt)), GroupIndicator(std::move(lt)), eps};
}

double disagreement_mass(const Predictor& f1, const Predictor& f2, double eps, const EmpiricalMeasure& mu) {
  return mu.mass(disagreement_region(f1, f2, eps).u);
}

double round_to_grid(double v, int m) {
  if (m < 1) throw ParameterError(fmt::format("grid size must be >= 1, got {}", m));
  const double md = static_cast<double>(m);
  const double k = std::floor(v * md + 0.5);
  // Guard against v*m landing one ulp off a midpoint: pick the best of the
  // neighbouring grid points, ties to the larger.
  double best = k / md;
  double best_err = std::abs(best - v);
  for (double c : {k - 1.0, k + 1.0}) {
    const double cand = c / md;
    const double err = std::abs(cand - v);
    if (err < best_err || (err == best_err && cand > best)) {
      best = cand;
      best_err = err;
    }
  }
  return best;
}

std::vector<double> patch_unprojected(std::span<const double> values, const GroupIndicator& g, double delta) {
  require_same_size(values.size(), g.size(), "patch");
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (g[i]) out[i] += delta;
  }
  return out;
}

Predictor patch(const Predictor& f, const GroupIndicator& g, double delta) {
  auto shifted = patch_unprojected(f.values(), g, delta);
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    if (g[i]) shifted[i] = f.range().clamp(shifted[i]);
  }
  return Predictor(std::move(shifted), f.range());
}

double mean_consistency_gap(const Predictor& f, const Dataset& d, const GroupIndicator& g) {
  require_same_size(f.size(), d.size(), "mean_consistency_gap");
  const auto& mu = d.measure();
  return mu.mean(d.labels(), g) - mu.mean(f.values(), g);
}

}  // namespace recon
