#include "reconcile/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "random.hpp"

namespace recon::io {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  s = s.substr(b, e - b);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? pos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(const CsvTable& t, std::size_t row) { return fmt::format("{}:{}", t.source, row + 2); }

double parse_number(const CsvTable& t, std::size_t row, const std::string& col, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty() || !std::isfinite(v)) {
    throw InputError(fmt::format("{}: column '{}' holds '{}', not a finite number", where(t, row), col, text));
  }
  return v;
}

bool parse_flag(const CsvTable& t, std::size_t row, const std::string& col, const std::string& text) {
  const double v = parse_number(t, row, col, text);
  if (v != 0.0 && v != 1.0) {
    throw InputError(fmt::format("{}: column '{}' must be 0 or 1, got '{}'", where(t, row), col, text));
  }
  return v == 1.0;
}

std::size_t parse_index(const CsvTable& t, std::size_t row, const std::string& col, const std::string& text) {
  std::size_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw InputError(fmt::format("{}: column '{}' holds '{}', not a non-negative integer", where(t, row), col, text));
  }
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  return out;
}

void write_rows(const std::filesystem::path& path, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  out << fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& r : rows) out << fmt::format("{}\n", fmt::join(r, ","));
}

const char* to_string(Termination t) { return t == Termination::converged ? "converged" : "round_cap"; }

json stats_json(const SummaryStats& s) {
  return {{"min", s.min}, {"max", s.max}, {"mean", s.mean}, {"std", s.std}, {"count", s.count}};
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw InputError(fmt::format("{}:1: missing required column '{}'", source, name));
  return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(header.begin(), header.end(), name) != header.end();
}

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable t;
  t.source = source;
  std::string line;
  if (!std::getline(in, line)) throw InputError(fmt::format("{}: file is empty", source));
  t.header = split_line(line);
  for (std::size_t a = 0; a < t.header.size(); ++a) {
    if (t.header[a].empty()) throw InputError(fmt::format("{}:1: column {} has an empty name", source, a + 1));
    for (std::size_t b = 0; b < a; ++b) {
      if (t.header[a] == t.header[b]) throw InputError(fmt::format("{}:1: duplicate column '{}'", source, t.header[a]));
    }
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != t.header.size()) {
      throw InputError(
          fmt::format("{}:{}: expected {} fields, found {}", source, lineno, t.header.size(), fields.size()));
    }
    if (lineno != t.rows.size() + 2) {
      throw InputError(fmt::format("{}:{}: blank lines inside the data are not allowed", source, lineno));
    }
    t.rows.push_back(std::move(fields));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  return parse_csv(in, path.string());
}

std::string format_number(double v) { return fmt::format("{}", v); }

Dataset load_labels(const std::filesystem::path& path, LabelKind kind) {
  const auto t = read_csv(path);
  const auto id_col = t.column("id");
  const auto y_col = t.column("y");
  if (t.rows.empty()) throw InputError(fmt::format("{}: no data rows", t.source));

  std::vector<std::string> ids;
  std::vector<double> y;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& id = t.rows[r][id_col];
    if (id.empty()) throw InputError(fmt::format("{}: empty id", where(t, r)));
    if (auto [it, fresh] = seen.emplace(id, r); !fresh) {
      throw InputError(fmt::format("{}: duplicate id '{}' (first seen at line {})", where(t, r), id, it->second + 2));
    }
    ids.push_back(id);
    const double v = parse_number(t, r, "y", t.rows[r][y_col]);
    if (kind == LabelKind::binary && v != 0.0 && v != 1.0) {
      throw InputError(fmt::format("{}: label {} is not binary", where(t, r), t.rows[r][y_col]));
    }
    y.push_back(v);
  }
  Dataset d(std::move(y), kind, std::move(ids));

  if (t.has_column("t")) {
    const auto c = t.column("t");
    std::vector<bool> treat;
    for (std::size_t r = 0; r < t.rows.size(); ++r) treat.push_back(parse_flag(t, r, "t", t.rows[r][c]));
    d.set_treatment(std::move(treat));
  }
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const auto& name = t.header[c];
    if (!name.starts_with("group_")) continue;
    std::vector<bool> mask;
    for (std::size_t r = 0; r < t.rows.size(); ++r) mask.push_back(parse_flag(t, r, name, t.rows[r][c]));
    d.add_group(name.substr(6), GroupIndicator(std::move(mask)));
  }
  return d;
}

void save_labels(const std::filesystem::path& path, const Dataset& d) {
  std::vector<std::string> header = {"id", "y"};
  if (d.treatment()) header.push_back("t");
  for (const auto& [name, g] : d.groups()) header.push_back("group_" + name);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::vector<std::string> r = {d.ids()[i], format_number(d.label(i))};
    if (d.treatment()) r.push_back((*d.treatment())[i] ? "1" : "0");
    for (const auto& [name, g] : d.groups()) r.push_back(g[i] ? "1" : "0");
    rows.push_back(std::move(r));
  }
  write_rows(path, header, rows);
}

ModelSet load_predictions(const std::filesystem::path& path, const Dataset& d, Interval range) {
  const auto t = read_csv(path);
  const auto id_col = t.column("id");
  std::vector<std::size_t> model_cols;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c != id_col) model_cols.push_back(c);
  }
  if (model_cols.empty()) throw InputError(fmt::format("{}:1: no model columns", t.source));

  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < d.size(); ++i) row_of.emplace(d.ids()[i], i);

  std::vector<std::vector<double>> values(model_cols.size(), std::vector<double>(d.size(), 0.0));
  std::vector<bool> filled(d.size(), false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& id = t.rows[r][id_col];
    auto it = row_of.find(id);
    if (it == row_of.end()) throw InputError(fmt::format("{}: id '{}' is not in the label file", where(t, r), id));
    if (filled[it->second]) throw InputError(fmt::format("{}: duplicate id '{}'", where(t, r), id));
    filled[it->second] = true;
    for (std::size_t k = 0; k < model_cols.size(); ++k) {
      const auto& col = t.header[model_cols[k]];
      const double v = parse_number(t, r, col, t.rows[r][model_cols[k]]);
      if (!range.contains(v)) {
        throw InputError(fmt::format("{}: column '{}' value {} is outside [{}, {}]", where(t, r), col,
                                     t.rows[r][model_cols[k]], range.lo, range.hi));
      }
      values[k][it->second] = v;
    }
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!filled[i]) throw InputError(fmt::format("{}: no predictions for id '{}'", t.source, d.ids()[i]));
  }

  ModelSet ms;
  for (std::size_t k = 0; k < model_cols.size(); ++k) ms.add(Predictor(std::move(values[k]), range), t.header[model_cols[k]]);
  return ms;
}

void save_predictions(const std::filesystem::path& path, const ModelSet& ms, const std::vector<std::string>& ids) {
  if (ids.size() != ms.rows()) throw AlignmentError("id list and model rows differ in length");
  std::vector<std::string> header = {"id"};
  header.insert(header.end(), ms.labels().begin(), ms.labels().end());
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    std::vector<std::string> r = {ids[i]};
    for (const auto& f : ms.models()) r.push_back(format_number(f[i]));
    rows.push_back(std::move(r));
  }
  write_rows(path, header, rows);
}

CausalDataset load_causal(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  const auto id_col = t.column("id");
  const auto cell_col = t.column("cell");
  const auto y_col = t.column("y");
  const auto t_col = t.column("t");
  if (t.rows.empty()) throw InputError(fmt::format("{}: no data rows", t.source));
  std::vector<std::string> ids;
  std::vector<std::size_t> cell;
  std::vector<double> y;
  std::vector<bool> treat;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& id = t.rows[r][id_col];
    if (!seen.emplace(id, r).second) throw InputError(fmt::format("{}: duplicate id '{}'", where(t, r), id));
    ids.push_back(id);
    cell.push_back(parse_index(t, r, "cell", t.rows[r][cell_col]));
    y.push_back(parse_flag(t, r, "y", t.rows[r][y_col]) ? 1.0 : 0.0);
    treat.push_back(parse_flag(t, r, "t", t.rows[r][t_col]));
  }
  return CausalDataset(std::move(cell), std::move(y), std::move(treat), 0, std::move(ids));
}

void save_causal(const std::filesystem::path& path, const CausalDataset& cd) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < cd.size(); ++i) {
    rows.push_back({cd.ids()[i], std::to_string(cd.cell(i)), cd.y(i) == 1.0 ? "1" : "0", cd.treated(i) ? "1" : "0"});
  }
  write_rows(path, {"id", "cell", "y", "t"}, rows);
}

std::vector<CateEstimatorVector> load_estimators(const std::filesystem::path& path, std::size_t n_cells,
                                                 Interval range) {
  const auto t = read_csv(path);
  const auto cell_col = t.column("cell");
  std::vector<CateEstimatorVector> out;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c != cell_col) out.push_back({std::vector<double>(n_cells, 0.0), range, t.header[c]});
  }
  if (out.empty()) throw InputError(fmt::format("{}:1: no estimator columns", t.source));
  std::vector<bool> seen(n_cells, false);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto cell = parse_index(t, r, "cell", t.rows[r][cell_col]);
    if (cell >= n_cells) throw InputError(fmt::format("{}: cell {} is outside [0, {})", where(t, r), cell, n_cells));
    if (seen[cell]) throw InputError(fmt::format("{}: duplicate cell {}", where(t, r), cell));
    seen[cell] = true;
    std::size_t k = 0;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (c == cell_col) continue;
      const double v = parse_number(t, r, t.header[c], t.rows[r][c]);
      if (!range.contains(v)) {
        throw InputError(fmt::format("{}: column '{}' value {} is outside [{}, {}]", where(t, r), t.header[c],
                                     t.rows[r][c], range.lo, range.hi));
      }
      out[k++].values[cell] = v;
    }
  }
  for (std::size_t c = 0; c < n_cells; ++c) {
    if (!seen[c]) throw InputError(fmt::format("{}: no estimates for cell {}", t.source, c));
  }
  return out;
}

void save_estimators(const std::filesystem::path& path, const std::vector<CateEstimatorVector>& est) {
  if (est.empty()) throw ParameterError("no estimators to save");
  std::vector<std::string> header = {"cell"};
  for (const auto& e : est) header.push_back(e.label);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t c = 0; c < est.front().values.size(); ++c) {
    std::vector<std::string> r = {std::to_string(c)};
    for (const auto& e : est) r.push_back(format_number(e.values.at(c)));
    rows.push_back(std::move(r));
  }
  write_rows(path, header, rows);
}

json trace_to_json(const ReconcileResult& res, std::size_t mask_limit) {
  json rounds = json::array();
  const std::size_t n = res.f1_initial.size();
  for (const auto& r : res.trace) {
    json group;
    if (n <= mask_limit) {
      group = {{"members", r.group.members()}};
    } else {
      group = {{"predicate",
                {{"rule", r.direction == Direction::greater ? "f1 - f2 > epsilon" : "f2 - f1 > epsilon"},
                 {"epsilon", res.epsilon},
                 {"round", r.t}}}};
    }
    rounds.push_back({{"t", r.t},
                      {"patched_model", r.patched_model},
                      {"direction", std::string(1, symbol(r.direction))},
                      {"group_mass", r.group_mass},
                      {"group_size", r.group.count()},
                      {"delta_raw", r.delta_raw},
                      {"delta", r.delta},
                      {"brier_before", r.brier_before},
                      {"brier_after", r.brier_after},
                      {"disagreement_mass_before", r.disagreement_mass_before},
                      {"group", group}});
  }
  return {{"alpha", res.alpha},
          {"epsilon", res.epsilon},
          {"grid", res.grid},
          {"max_rounds", res.max_rounds},
          {"n", n},
          {"terminated_by", to_string(res.terminated_by)},
          {"rounds", res.rounds()},
          {"t1", res.t1},
          {"t2", res.t2},
          {"brier", {{"f1_initial", res.brier1_initial}, {"f2_initial", res.brier2_initial},
                     {"f1_final", res.brier1_final}, {"f2_final", res.brier2_final}}},
          {"disagreement", {{"initial", res.disagreement_initial}, {"final", res.disagreement_final}}},
          {"trace", rounds}};
}

json to_json(const MaAuditReport& rep) {
  json groups = json::array();
  for (const auto& g : rep.per_group) {
    groups.push_back({{"round", g.round},
                      {"direction", std::string(1, symbol(g.direction))},
                      {"patched_model", g.patched_model},
                      {"audited_model", g.audited_model},
                      {"mass", g.mass},
                      {"gap", g.gap},
                      {"bound", g.bound},
                      {"violated", g.violated}});
  }
  json post = json::array();
  for (const auto& c : rep.post_patch) {
    post.push_back({{"round", c.round},
                    {"gap", c.gap},
                    {"expected", c.expected},
                    {"residual_bound", c.residual_bound},
                    {"gap_projected", c.gap_projected},
                    {"holds", c.holds}});
  }
  return {{"beta", rep.beta},         {"max_excess", rep.max_excess},       {"violations", rep.violations},
          {"per_group", groups},      {"post_patch", post},                 {"post_patch_ok", rep.post_patch_ok},
          {"replay_matches", rep.replay_matches}};
}

json to_json(const MultiplicityReport& rep) {
  json j = {{"ambiguity", rep.ambiguity}, {"variance_stats", stats_json(rep.variance_stats)},
            {"epsilon_used", rep.epsilon_used}};
  j["discrepancy"] = rep.discrepancy ? json(*rep.discrepancy) : json("n/a");
  j["disagreement_stats"] = rep.disagreement_stats ? stats_json(*rep.disagreement_stats) : json("n/a");
  return j;
}

json to_json(const FairnessReport& rep) {
  json grid = json::array();
  for (int m : {1, 2}) {
    for (auto ph : {Phase::before, Phase::after}) {
      for (auto c : {Cohort::majority, Cohort::minority}) {
        grid.push_back({{"model", m},
                        {"phase", ph == Phase::before ? "before" : "after"},
                        {"cohort", c == Cohort::majority ? "majority" : "minority"},
                        {"brier", rep.at(m, ph, c)}});
      }
    }
  }
  return {{"grid", grid},
          {"minority_mass", rep.minority_mass},
          {"majority_mass", rep.majority_mass},
          {"slack", rep.slack},
          {"subgroup_bound", rep.subgroup_bound},
          {"applicable", rep.applicable},
          {"bound_satisfied", rep.bound_satisfied},
          {"rounds", rep.run.rounds()}};
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : rows) out.push_back({std::to_string(r.k), r.method, format_number(r.mse), std::to_string(r.seed)});
  write_rows(path, {"k", "method", "mse", "seed"}, out);
}

void write_pair_mass_csv(const std::filesystem::path& path, const std::vector<PairMass>& pairs,
                         const std::vector<std::string>& labels) {
  std::vector<std::vector<std::string>> out;
  for (const auto& p : pairs) out.push_back({labels.at(p.i), labels.at(p.j), format_number(p.mass)});
  write_rows(path, {"model_i", "model_j", "mass"}, out);
}

void write_fairness_csv(const std::filesystem::path& path, const FairnessReport& rep) {
  std::vector<std::vector<std::string>> out;
  for (int m : {1, 2}) {
    for (auto ph : {Phase::before, Phase::after}) {
      for (auto c : {Cohort::majority, Cohort::minority}) {
        out.push_back({std::to_string(m), ph == Phase::before ? "before" : "after",
                       c == Cohort::majority ? "majority" : "minority", format_number(rep.at(m, ph, c))});
      }
    }
  }
  write_rows(path, {"model", "phase", "cohort", "brier"}, out);
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, std::array<double, 3> fractions) {
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0 && f <= 1.0)) throw ParameterError(fmt::format("split fraction {} is outside [0, 1]", f));
    total += f;
  }
  if (std::fabs(total - 1.0) > 1e-9) throw ParameterError(fmt::format("split fractions sum to {}, not 1", total));

  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t used = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = fractions[k] * static_cast<double>(n);
    // guard against 0.6 * 10 landing just under 6
    const double rounded = std::round(exact);
    const double base = std::fabs(exact - rounded) < 1e-9 ? rounded : std::floor(exact);
    sizes[k] = static_cast<std::size_t>(base);
    rem[k] = exact - base;
    used += sizes[k];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; used < n; k = (k + 1) % 3, ++used) ++sizes[order[k]];
  return sizes;
}

Split split_dataset(const Dataset& d, std::array<double, 3> fractions, std::uint64_t seed) {
  const auto sizes = split_sizes(d.size(), fractions);
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto rng = detail::make_rng(seed, detail::kSplit);
  std::shuffle(idx.begin(), idx.end(), rng);

  Split s;
  std::array<std::vector<std::size_t>*, 3> parts = {&s.train, &s.validation, &s.test};
  auto first = idx.begin();
  for (std::size_t k = 0; k < 3; ++k) {
    const auto last = first + static_cast<std::ptrdiff_t>(sizes[k]);
    parts[k]->assign(first, last);
    std::sort(parts[k]->begin(), parts[k]->end());
    first = last;
  }
  return s;
}

}  // namespace recon::io
