#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "reconcile/aggregation.hpp"
#include "reconcile/cate.hpp"
#include "reconcile/core.hpp"
#include "reconcile/engine.hpp"
#include "reconcile/fairness.hpp"
#include "reconcile/maaudit.hpp"
#include "reconcile/multiplicity.hpp"

namespace recon::io {

using json = nlohmann::json;

// Header plus data rows of a comma-separated file. Line numbers in errors are
// 1-based file lines, so the first data row is line 2.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // InputError when missing
  bool has_column(const std::string& name) const;
};

CsvTable parse_csv(std::istream& in, const std::string& source);
CsvTable read_csv(const std::filesystem::path& path);

// Shortest text that parses back to the same double.
std::string format_number(double v);

// id,y[,t][,group_<name>...]
Dataset load_labels(const std::filesystem::path& path, LabelKind kind = LabelKind::binary);
void save_labels(const std::filesystem::path& path, const Dataset& d);

// id,<model>...; rows are joined to d by id and may come in any order.
ModelSet load_predictions(const std::filesystem::path& path, const Dataset& d, Interval range = {});
void save_predictions(const std::filesystem::path& path, const ModelSet& ms, const std::vector<std::string>& ids);

// id,cell,y,t
CausalDataset load_causal(const std::filesystem::path& path);
void save_causal(const std::filesystem::path& path, const CausalDataset& cd);

// cell,<estimator>...; every cell in [0, n_cells) must appear exactly once.
std::vector<CateEstimatorVector> load_estimators(const std::filesystem::path& path, std::size_t n_cells,
                                                 Interval range = {-1.0, 1.0});
void save_estimators(const std::filesystem::path& path, const std::vector<CateEstimatorVector>& est);

inline constexpr std::size_t kMaskLimit = 10000;

// Groups are written as member lists up to mask_limit rows and as the
// defining disagreement predicate above it.
json trace_to_json(const ReconcileResult& res, std::size_t mask_limit = kMaskLimit);
json to_json(const MaAuditReport& rep);
json to_json(const MultiplicityReport& rep);
json to_json(const FairnessReport& rep);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
void write_pair_mass_csv(const std::filesystem::path& path, const std::vector<PairMass>& pairs,
                         const std::vector<std::string>& labels);
// model,phase,cohort,brier
void write_fairness_csv(const std::filesystem::path& path, const FairnessReport& rep);

void write_json(const std::filesystem::path& path, const json& j);
void write_text(const std::filesystem::path& path, const std::string& text);

// Row indices of a seeded train/validation/test partition. Sizes are
// floor(f * n) with the leftover rows handed out one at a time by largest
// fractional remainder, earlier parts first on ties.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};

Split split_dataset(const Dataset& d, std::array<double, 3> fractions, std::uint64_t seed);
std::array<std::size_t, 3> split_sizes(std::size_t n, std::array<double, 3> fractions);

}  // namespace recon::io
