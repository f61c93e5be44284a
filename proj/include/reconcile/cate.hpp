#pragma once

#include <string>
#include <vector>

#include "reconcile/core.hpp"
#include "reconcile/engine.hpp"

namespace recon {

// Units with a subgroup (cell) id, binary outcome and binary treatment.
class CausalDataset {
 public:
  CausalDataset() = default;
  // n_cells == 0 infers max(cell) + 1.
  CausalDataset(std::vector<std::size_t> cell, std::vector<double> y, std::vector<bool> t, std::size_t n_cells = 0,
                std::vector<std::string> ids = {});

  std::size_t size() const noexcept { return y_.size(); }
  std::size_t n_cells() const noexcept { return n_cells_; }
  std::size_t cell(std::size_t i) const { return cell_[i]; }
  double y(std::size_t i) const { return y_[i]; }
  bool treated(std::size_t i) const { return t_[i]; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  std::vector<std::size_t> cell_sizes() const;

 private:
  std::vector<std::size_t> cell_;
  std::vector<double> y_;
  std::vector<bool> t_;
  std::size_t n_cells_ = 0;
  std::vector<std::string> ids_;
};

enum class CellWeighting { uniform, by_cell_size };

struct CatePseudoDataset {
  std::size_t n_cells = 0;
  std::vector<std::size_t> cells;           // included cell ids, ascending
  std::vector<double> pseudo_outcome;       // per included cell
  std::vector<double> weight;               // per included cell, sums to 1
  std::vector<std::size_t> cell_size;       // units per included cell
  std::vector<std::size_t> excluded_cells;  // no treated or no control units

  std::size_t size() const noexcept { return cells.size(); }
  // Real-valued dataset over the included cells, weighted by `weight`.
  Dataset as_dataset() const;
};

// One CATE estimate per cell id (all n_cells cells).
struct CateEstimatorVector {
  std::vector<double> values;
  Interval range{-1.0, 1.0};
  std::string label;

  Predictor as_predictor() const { return Predictor(values, range); }
  // Restriction to the included cells of pd, in pd order.
  Predictor restrict_to(const CatePseudoDataset& pd) const;
};

CatePseudoDataset build_pseudo_dataset(const CausalDataset& cd, CellWeighting weighting = CellWeighting::uniform);

// Reduction to the core engine: labels are the pseudo-outcomes and the cell
// weights define the distribution. The result's predictors run over pd.cells.
ReconcileResult reconcile_cate(const CateEstimatorVector& t1, const CateEstimatorVector& t2,
                               const CatePseudoDataset& pd, const ReconcileParams& params);

// Writes the reconciled values back into a full per-cell vector; excluded
// cells keep their original estimates.
CateEstimatorVector expand_to_cells(const CatePseudoDataset& pd, const Predictor& reconciled,
                                    const CateEstimatorVector& original);

// Unit-level reconciliation: v* is the treated-minus-control outcome mean over
// the units in the disagreement region. Each cell weighs its unit count.
// Throws OverlapError when a region lacks treated or control units.
ReconcileResult reconcile_cate_unit_level(const CateEstimatorVector& t1, const CateEstimatorVector& t2,
                                          const CausalDataset& cd, const ReconcileParams& params);

// Weighted squared error against the pseudo-outcomes of the included cells.
double cate_brier(const CateEstimatorVector& t, const CatePseudoDataset& pd);

}  // namespace recon
