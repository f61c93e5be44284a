#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reconcile/errors.hpp"

namespace recon {

// Absolute tolerance used whenever a computed quantity is compared against a
// guaranteed bound.
inline constexpr double kBoundTolerance = 1e-9;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  double clamp(double v) const noexcept { return v < lo ? lo : (v > hi ? hi : v); }
  double width() const noexcept { return hi - lo; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

class GroupIndicator {
 public:
  GroupIndicator() = default;
  explicit GroupIndicator(std::vector<bool> mask) : mask_(std::move(mask)) {}

  static GroupIndicator all(std::size_t n) { return GroupIndicator(std::vector<bool>(n, true)); }
  static GroupIndicator none(std::size_t n) { return GroupIndicator(std::vector<bool>(n, false)); }
  static GroupIndicator from_members(std::size_t n, std::span<const std::size_t> members);

  std::size_t size() const noexcept { return mask_.size(); }
  bool operator[](std::size_t i) const { return mask_[i]; }
  void set(std::size_t i, bool v) { mask_[i] = v; }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }
  std::vector<std::size_t> members() const;
  const std::vector<bool>& mask() const noexcept { return mask_; }

  GroupIndicator complement() const;

  friend bool operator==(const GroupIndicator&, const GroupIndicator&) = default;

 private:
  std::vector<bool> mask_;
};

// A vector of predictions with a declared output range. Values are always
// finite and inside the range.
class Predictor {
 public:
  Predictor() = default;
  explicit Predictor(std::vector<double> values, Interval range = {});

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const Interval& range() const noexcept { return range_; }

  friend bool operator==(const Predictor&, const Predictor&) = default;

 private:
  std::vector<double> values_;
  Interval range_;
};

// Probability weights over sample rows. The uniform case is kept separate so
// masses such as 3/12 come out exact.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(std::size_t n) : n_(n) {}
  explicit EmpiricalMeasure(std::vector<double> weights);

  std::size_t size() const noexcept { return n_; }
  bool uniform() const noexcept { return weights_.empty(); }
  double weight(std::size_t i) const { return uniform() ? 1.0 / static_cast<double>(n_) : weights_[i]; }

  double mass(const GroupIndicator& g) const;
  // Conditional mean of values given g; EmptyGroupError when g has no mass.
  double mean(std::span<const double> values, const GroupIndicator& g) const;
  double mean(std::span<const double> values) const;
  double mean_squared_error(std::span<const double> a, std::span<const double> b) const;
  double mean_squared_error(std::span<const double> a, std::span<const double> b,
                            const GroupIndicator& g) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> weights_;  // normalized; empty when uniform
};

enum class LabelKind { binary, real };

class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<double> labels, LabelKind kind = LabelKind::binary,
                   std::vector<std::string> ids = {});

  std::size_t size() const noexcept { return labels_.size(); }
  LabelKind kind() const noexcept { return kind_; }
  std::span<const double> labels() const noexcept { return labels_; }
  double label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const EmpiricalMeasure& measure() const noexcept { return measure_; }

  void set_weights(std::vector<double> weights);

  void add_group(const std::string& name, GroupIndicator g);
  const std::map<std::string, GroupIndicator>& groups() const noexcept { return groups_; }
  const GroupIndicator& group(const std::string& name) const;

  void set_treatment(std::vector<bool> treatment);
  const std::optional<std::vector<bool>>& treatment() const noexcept { return treatment_; }

  // Rows listed in `rows`, in that order, with groups/treatment carried along.
  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  std::vector<double> labels_;
  LabelKind kind_ = LabelKind::binary;
  std::vector<std::string> ids_;
  EmpiricalMeasure measure_;
  std::map<std::string, GroupIndicator> groups_;
  std::optional<std::vector<bool>> treatment_;
};

struct DisagreementRegion {
  GroupIndicator u;
  GroupIndicator u_gt;  // f1 > f2 + eps
  GroupIndicator u_lt;  // f1 < f2 - eps
  double epsilon = 0.0;
};

double brier_score(const Predictor& f, const Dataset& d);
double restricted_brier(const Predictor& f, const Dataset& d, const GroupIndicator& p);
double group_mass(const GroupIndicator& g, const Dataset& d);

DisagreementRegion disagreement_region(const Predictor& f1, const Predictor& f2, double eps);
double disagreement_mass(const Predictor& f1, const Predictor& f2, double eps, const EmpiricalMeasure& mu);

// Nearest multiple of 1/m; the grid extends to negative values and exact
// midpoints go toward +inf.
double round_to_grid(double v, int m);

// Adds delta on g and clamps to f's range.
Predictor patch(const Predictor& f, const GroupIndicator& g, double delta);
// The same shift without the projection step.
std::vector<double> patch_unprojected(std::span<const double> values, const GroupIndicator& g, double delta);

// E[y | g] - E[f | g].
double mean_consistency_gap(const Predictor& f, const Dataset& d, const GroupIndicator& g);

}  // namespace recon
