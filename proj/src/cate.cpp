#include "reconcile/cate.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace recon {

CausalDataset::CausalDataset(std::vector<std::size_t> cell, std::vector<double> y, std::vector<bool> t,
                             std::size_t n_cells, std::vector<std::string> ids)
    : cell_(std::move(cell)), y_(std::move(y)), t_(std::move(t)), n_cells_(n_cells), ids_(std::move(ids)) {
  if (y_.empty()) throw InputError("causal dataset must contain at least one unit");
  if (cell_.size() != y_.size() || t_.size() != y_.size()) {
    throw AlignmentError("causal dataset columns differ in length");
  }
  if (n_cells_ == 0) n_cells_ = *std::max_element(cell_.begin(), cell_.end()) + 1;
  for (std::size_t i = 0; i < y_.size(); ++i) {
    if (cell_[i] >= n_cells_) {
      throw InputError(fmt::format("cell id {} at row {} is outside [0, {})", cell_[i], i, n_cells_));
    }
    if (y_[i] != 0.0 && y_[i] != 1.0) throw InputError(fmt::format("outcome {} at row {} is not binary", y_[i], i));
  }
  if (ids_.empty()) {
    for (std::size_t i = 0; i < y_.size(); ++i) ids_.push_back(std::to_string(i));
  }
  if (ids_.size() != y_.size()) throw AlignmentError("causal dataset ids differ in length");
}

std::vector<std::size_t> CausalDataset::cell_sizes() const {
  std::vector<std::size_t> sizes(n_cells_, 0);
  for (auto c : cell_) ++sizes[c];
  return sizes;
}

namespace {

struct CellTally {
  double treated_sum = 0.0;
  double control_sum = 0.0;
  std::size_t treated = 0;
  std::size_t control = 0;

  bool overlap() const { return treated > 0 && control > 0; }
  double pseudo() const {
    return treated_sum / static_cast<double>(treated) - control_sum / static_cast<double>(control);
  }
};

std::vector<CellTally> tally(const CausalDataset& cd) {
  std::vector<CellTally> cells(cd.n_cells());
  for (std::size_t i = 0; i < cd.size(); ++i) {
    auto& c = cells[cd.cell(i)];
    if (cd.treated(i)) {
      c.treated_sum += cd.y(i);
      ++c.treated;
    } else {
      c.control_sum += cd.y(i);
      ++c.control;
    }
  }
  return cells;
}

class UnitLevelObjective final : public Objective {
 public:
  UnitLevelObjective(std::vector<CellTally> cells, std::vector<double> weights)
      : Objective(EmpiricalMeasure(std::move(weights))), cells_(std::move(cells)) {
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (cells_[c].overlap()) {
        overlap_cells_.push_back(c);
        overlap_weight_.push_back(static_cast<double>(cells_[c].treated + cells_[c].control));
        pseudo_.push_back(cells_[c].pseudo());
      }
    }
    if (overlap_cells_.empty()) throw OverlapError("no cell contains both treated and control units", -1);
  }

  double target_mean(const GroupIndicator& g, int round) const override {
    CellTally sum;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (!g[c]) continue;
      sum.treated_sum += cells_[c].treated_sum;
      sum.control_sum += cells_[c].control_sum;
      sum.treated += cells_[c].treated;
      sum.control += cells_[c].control;
    }
    if (!sum.overlap()) {
      throw OverlapError(fmt::format("disagreement region at round {} has no {} units", round,
                                     sum.treated == 0 ? "treated" : "control"),
                         round);
    }
    return sum.pseudo();
  }

  double brier(std::span<const double> values) const override {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < overlap_cells_.size(); ++k) {
      const double e = values[overlap_cells_[k]] - pseudo_[k];
      num += overlap_weight_[k] * e * e;
      den += overlap_weight_[k];
    }
    return num / den;
  }

 private:
  std::vector<CellTally> cells_;
  std::vector<std::size_t> overlap_cells_;
  std::vector<double> overlap_weight_;
  std::vector<double> pseudo_;
};

void require_cells(const CateEstimatorVector& t, std::size_t n_cells) {
  if (t.values.size() != n_cells) {
    throw AlignmentError(
        fmt::format("estimator '{}' has {} cells, expected {}", t.label, t.values.size(), n_cells));
  }
}

}  // namespace

Dataset CatePseudoDataset::as_dataset() const {
  std::vector<std::string> ids;
  for (auto c : cells) ids.push_back(std::to_string(c));
  Dataset d(pseudo_outcome, LabelKind::real, std::move(ids));
  d.set_weights(weight);
  return d;
}

Predictor CateEstimatorVector::restrict_to(const CatePseudoDataset& pd) const {
  require_cells(*this, pd.n_cells);
  std::vector<double> v;
  v.reserve(pd.size());
  for (auto c : pd.cells) v.push_back(values[c]);
  return Predictor(std::move(v), range);
}

CatePseudoDataset build_pseudo_dataset(const CausalDataset& cd, CellWeighting weighting) {
  const auto cells = tally(cd);
  CatePseudoDataset pd;
  pd.n_cells = cd.n_cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (!cells[c].overlap()) {
      pd.excluded_cells.push_back(c);
      continue;
    }
    pd.cells.push_back(c);
    pd.pseudo_outcome.push_back(cells[c].pseudo());
    pd.cell_size.push_back(cells[c].treated + cells[c].control);
  }
  if (pd.cells.empty()) throw InputError("every cell violates overlap; the pseudo dataset is empty");

  double total = 0.0;
  for (std::size_t k = 0; k < pd.size(); ++k) {
    const double w = weighting == CellWeighting::uniform ? 1.0 : static_cast<double>(pd.cell_size[k]);
    pd.weight.push_back(w);
    total += w;
  }
  for (auto& w : pd.weight) w /= total;
  return pd;
}

ReconcileResult reconcile_cate(const CateEstimatorVector& t1, const CateEstimatorVector& t2,
                               const CatePseudoDataset& pd, const ReconcileParams& params) {
  const Dataset d = pd.as_dataset();
  return reconcile(t1.restrict_to(pd), t2.restrict_to(pd), d, params);
}

CateEstimatorVector expand_to_cells(const CatePseudoDataset& pd, const Predictor& reconciled,
                                    const CateEstimatorVector& original) {
  require_cells(original, pd.n_cells);
  if (reconciled.size() != pd.size()) throw AlignmentError("reconciled vector does not match the included cells");
  CateEstimatorVector out = original;
  for (std::size_t k = 0; k < pd.size(); ++k) out.values[pd.cells[k]] = reconciled[k];
  return out;
}

ReconcileResult reconcile_cate_unit_level(const CateEstimatorVector& t1, const CateEstimatorVector& t2,
                                          const CausalDataset& cd, const ReconcileParams& params) {
  require_cells(t1, cd.n_cells());
  require_cells(t2, cd.n_cells());
  std::vector<double> weights;
  for (auto s : cd.cell_sizes()) weights.push_back(static_cast<double>(s));
  UnitLevelObjective obj(tally(cd), std::move(weights));
  return reconcile(t1.as_predictor(), t2.as_predictor(), obj, params);
}

double cate_brier(const CateEstimatorVector& t, const CatePseudoDataset& pd) {
  require_cells(t, pd.n_cells);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < pd.size(); ++k) {
    const double e = t.values[pd.cells[k]] - pd.pseudo_outcome[k];
    num += pd.weight[k] * e * e;
    den += pd.weight[k];
  }
  return num / den;
}

}  // namespace recon
