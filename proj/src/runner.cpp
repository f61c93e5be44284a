#include "reconcile/runner.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include <fmt/format.h>

#include "reconcile/aggregation.hpp"
#include "reconcile/cate.hpp"
#include "reconcile/fairness.hpp"
#include "reconcile/io.hpp"
#include "reconcile/maaudit.hpp"
#include "reconcile/multiplicity.hpp"
#include "reconcile/synth.hpp"

namespace recon {

namespace fs = std::filesystem;
using io::json;

const char* to_string(Task t) {
  switch (t) {
    case Task::reconcile: return "reconcile";
    case Task::seq: return "seq";
    case Task::aggregate: return "aggregate";
    case Task::metrics: return "metrics";
    case Task::cate: return "cate";
    case Task::fairness: return "fairness";
    case Task::robustness: return "robustness";
    case Task::synth: return "synth";
  }
  return "?";
}

Task parse_task(const std::string& s) {
  for (auto t : {Task::reconcile, Task::seq, Task::aggregate, Task::metrics, Task::cate, Task::fairness,
                 Task::robustness, Task::synth}) {
    if (s == to_string(t)) return t;
  }
  throw ParameterError(fmt::format("unknown task '{}'", s));
}

double RunConfig::effective_alpha() const { return alpha.value_or(task == Task::cate ? 0.01 : 0.05); }
double RunConfig::effective_epsilon() const { return epsilon.value_or(task == Task::cate ? 0.04 : 0.2); }
Interval RunConfig::effective_range() const {
  return range.value_or(task == Task::cate ? Interval{-1.0, 1.0} : Interval{0.0, 1.0});
}

ReconcileParams RunConfig::params() const {
  ReconcileParams p;
  p.alpha = effective_alpha();
  p.epsilon = effective_epsilon();
  p.max_rounds = max_rounds;
  return p;
}

void RunConfig::validate() const {
  params().validate();
  const auto r = effective_range();
  if (!(r.lo < r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw ParameterError(fmt::format("range [{}, {}] is empty or unbounded", r.lo, r.hi));
  }
  if (reps < 1) throw ParameterError(fmt::format("--reps must be at least 1, got {}", reps));
  if (split) io::split_sizes(1, *split);
  if (task != Task::synth) {
    if (labels.empty()) throw ParameterError(fmt::format("task '{}' needs --labels", to_string(task)));
    if (predictions.empty()) throw ParameterError(fmt::format("task '{}' needs --predictions", to_string(task)));
  }
  if (task == Task::cate && weighting != "uniform" && weighting != "by_cell_size") {
    throw ParameterError(fmt::format("unknown cell weighting '{}'", weighting));
  }
}

std::pair<Predictor, Predictor> transfer_patches(const ReconcileResult& res, Predictor g1, Predictor g2) {
  if (g1.size() != g2.size()) throw AlignmentError("transfer targets differ in length");
  for (const auto& r : res.trace) {
    const auto region = disagreement_region(g1, g2, res.epsilon);
    const auto& g = r.direction == Direction::greater ? region.u_gt : region.u_lt;
    if (g.empty()) continue;
    auto& target = r.patched_model == 1 ? g1 : g2;
    target = patch(target, g, r.delta);
  }
  return {std::move(g1), std::move(g2)};
}

std::vector<std::string> check_guarantees(const ReconcileResult& res) {
  std::vector<std::string> fails;
  const double bound = round_bound(res.brier1_initial, res.brier2_initial, res.alpha, res.epsilon);
  if (static_cast<double>(res.rounds()) > bound + kBoundTolerance) {
    fails.push_back(fmt::format("{} rounds exceed the bound {}", res.rounds(), bound));
  }
  const double step = per_round_improvement(res.alpha, res.epsilon);
  if (res.brier1_final > res.brier1_initial - res.t1 * step + kBoundTolerance) {
    fails.push_back(fmt::format("model 1 Brier {} misses the guaranteed decrease", res.brier1_final));
  }
  if (res.brier2_final > res.brier2_initial - res.t2 * step + kBoundTolerance) {
    fails.push_back(fmt::format("model 2 Brier {} misses the guaranteed decrease", res.brier2_final));
  }
  const double half_cell = 1.0 / (2.0 * res.grid);
  for (const auto& r : res.trace) {
    if (r.brier_before - r.brier_after < step - kBoundTolerance) {
      fails.push_back(fmt::format("round {} improved Brier by only {}", r.t, r.brier_before - r.brier_after));
    }
    if (std::fabs(r.delta_raw - r.delta) > half_cell) {
      fails.push_back(fmt::format("round {} rounding residual exceeds 1/(2m)", r.t));
    }
  }
  if (res.converged()) {
    if (!(res.disagreement_final < res.alpha)) {
      fails.push_back(fmt::format("final disagreement mass {} is not below alpha", res.disagreement_final));
    }
    const double gap = std::fabs(res.brier1_final - res.brier2_final);
    if (gap > 4 * res.epsilon + 3 * res.alpha + kBoundTolerance) {
      fails.push_back(fmt::format("final Brier gap {} exceeds 4 eps + 3 alpha", gap));
    }
  }
  return fails;
}

namespace {

const std::vector<std::string> kSummaryColumns = {
    "task", "rep", "stage", "n", "alpha", "epsilon", "grid", "rounds", "t1", "t2", "terminated_by",
    "brier1_initial", "brier2_initial", "brier1_final", "brier2_final", "round_bound", "round_bound_margin",
    "per_round_improvement", "min_round_gain", "brier1_margin", "brier2_margin", "disagreement_initial",
    "disagreement_final", "disagreement_margin", "brier_gap_final", "brier_gap_bound", "brier_gap_margin",
    "max_rounding_residual", "rounding_bound", "test_brier1_before", "test_brier1_after", "test_brier2_before",
    "test_brier2_after", "test_disagreement_before", "test_disagreement_after"};

struct Eval {
  double b1_before, b1_after, b2_before, b2_after, dis_before, dis_after;
};

std::string num(double v) { return io::format_number(v); }

class Session {
 public:
  explicit Session(const RunConfig& cfg) : cfg_(cfg) {}

  void record(const ReconcileResult& res, int rep, const std::string& stage, const std::optional<Eval>& eval = {}) {
    json j = io::trace_to_json(res);
    j["rep"] = rep;
    j["stage"] = stage;
    runs_.push_back(std::move(j));

    const double bound = round_bound(res.brier1_initial, res.brier2_initial, res.alpha, res.epsilon);
    const double step = per_round_improvement(res.alpha, res.epsilon);
    double min_gain = 0.0;
    double max_resid = 0.0;
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
      const auto& r = res.trace[k];
      const double gain = r.brier_before - r.brier_after;
      min_gain = k == 0 ? gain : std::min(min_gain, gain);
      max_resid = std::max(max_resid, std::fabs(r.delta_raw - r.delta));
    }
    const double gap = std::fabs(res.brier1_final - res.brier2_final);
    const double gap_bound = 4 * res.epsilon + 3 * res.alpha;
    std::vector<std::string> row = {to_string(cfg_.task),
                                    std::to_string(rep),
                                    stage,
                                    std::to_string(res.f1_initial.size()),
                                    num(res.alpha),
                                    num(res.epsilon),
                                    std::to_string(res.grid),
                                    std::to_string(res.rounds()),
                                    std::to_string(res.t1),
                                    std::to_string(res.t2),
                                    res.converged() ? "converged" : "round_cap",
                                    num(res.brier1_initial),
                                    num(res.brier2_initial),
                                    num(res.brier1_final),
                                    num(res.brier2_final),
                                    num(bound),
                                    num(bound - res.rounds()),
                                    num(step),
                                    res.trace.empty() ? "" : num(min_gain),
                                    num(res.brier1_initial - res.t1 * step - res.brier1_final),
                                    num(res.brier2_initial - res.t2 * step - res.brier2_final),
                                    num(res.disagreement_initial),
                                    num(res.disagreement_final),
                                    num(res.alpha - res.disagreement_final),
                                    num(gap),
                                    num(gap_bound),
                                    num(gap_bound - gap),
                                    num(max_resid),
                                    num(1.0 / (2.0 * res.grid))};
    if (eval) {
      for (double v : {eval->b1_before, eval->b1_after, eval->b2_before, eval->b2_after, eval->dis_before,
                       eval->dis_after}) {
        row.push_back(num(v));
      }
    } else {
      row.resize(kSummaryColumns.size());
    }
    rows_.push_back(std::move(row));

    for (const auto& f : check_guarantees(res)) violation(fmt::format("rep {} {}: {}", rep, stage, f));
    if (!res.converged()) {
      capped_ = true;
      std::cerr << fmt::format("warning: rep {} {} stopped at the round cap ({} rounds)\n", rep, stage,
                               res.rounds());
    }
  }

  void violation(const std::string& what) {
    violated_ = true;
    std::cerr << "invariant violated: " << what << '\n';
  }

  void write() const {
    json trace = {{"task", to_string(cfg_.task)}, {"runs", runs_}};
    io::write_json(cfg_.out / "trace.json", trace);
    std::string text = fmt::format("{}\n", fmt::join(kSummaryColumns, ","));
    for (const auto& r : rows_) text += fmt::format("{}\n", fmt::join(r, ","));
    io::write_text(cfg_.out / "summary.csv", text);
  }

  int exit_code() const { return violated_ ? kExitInvariant : capped_ ? kExitRoundCap : kExitOk; }

 private:
  const RunConfig& cfg_;
  json runs_ = json::array();
  std::vector<std::vector<std::string>> rows_;
  bool violated_ = false;
  bool capped_ = false;
};

Predictor rows_of(const Predictor& f, const std::vector<std::size_t>& rows) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (auto r : rows) v.push_back(f[r]);
  return Predictor(std::move(v), f.range());
}

ModelSet select_models(const ModelSet& all, const std::vector<std::string>& names, std::size_t default_count) {
  if (names.empty()) {
    if (default_count == 0 || all.size() <= default_count) return all;
    ModelSet out;
    for (std::size_t k = 0; k < default_count; ++k) out.add(all[k], all.labels()[k]);
    return out;
  }
  ModelSet out;
  for (const auto& name : names) {
    auto it = std::find(all.labels().begin(), all.labels().end(), name);
    if (it == all.labels().end()) throw InputError(fmt::format("prediction file has no column '{}'", name));
    const auto k = static_cast<std::size_t>(it - all.labels().begin());
    out.add(all[k], all.labels()[k]);
  }
  return out;
}

struct Inputs {
  Dataset d;
  ModelSet ms;
};

Inputs load_inputs(const RunConfig& cfg, std::size_t default_count, std::size_t at_least) {
  Inputs in;
  in.d = io::load_labels(cfg.labels, cfg.real_labels ? LabelKind::real : LabelKind::binary);
  in.ms = select_models(io::load_predictions(cfg.predictions, in.d, cfg.effective_range()), cfg.models, default_count);
  if (in.ms.size() < at_least) {
    throw InputError(fmt::format("task '{}' needs at least {} model column(s), found {}", to_string(cfg.task),
                                 at_least, in.ms.size()));
  }
  return in;
}

Eval evaluate(const Predictor& a0, const Predictor& b0, const Predictor& a1, const Predictor& b1, const Dataset& d,
              double eps) {
  return {brier_score(a0, d),
          brier_score(a1, d),
          brier_score(b0, d),
          brier_score(b1, d),
          disagreement_mass(a0, b0, eps, d.measure()),
          disagreement_mass(a1, b1, eps, d.measure())};
}

int task_reconcile(const RunConfig& cfg) {
  Session s(cfg);
  const auto in = load_inputs(cfg, 2, 2);
  const auto params = cfg.params();
  json audits = json::array();
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
    if (cfg.split) {
      const auto sp = io::split_dataset(in.d, *cfg.split, seed);
      if (sp.validation.empty()) throw ParameterError("the validation split is empty");
      const Dataset val = in.d.subset(sp.validation);
      const auto res = reconcile(rows_of(in.ms[0], sp.validation), rows_of(in.ms[1], sp.validation), val, params);
      std::optional<Eval> eval;
      if (!sp.test.empty()) {
        const Dataset test = in.d.subset(sp.test);
        const auto a0 = rows_of(in.ms[0], sp.test);
        const auto b0 = rows_of(in.ms[1], sp.test);
        auto [a1, b1] = transfer_patches(res, a0, b0);
        eval = evaluate(a0, b0, a1, b1, test, params.epsilon);
      }
      s.record(res, rep, "validation", eval);
      auto audit = io::to_json(audit_trace(res, val, params.alpha * params.epsilon * params.epsilon));
      if (!audit["post_patch_ok"].get<bool>()) s.violation(fmt::format("rep {}: post-patch audit failed", rep));
      audit["rep"] = rep;
      audits.push_back(std::move(audit));
    } else {
      const auto res = reconcile(in.ms[0], in.ms[1], in.d, params);
      s.record(res, rep, "full");
      auto audit = io::to_json(audit_trace(res, in.d, params.alpha * params.epsilon * params.epsilon));
      if (!audit["post_patch_ok"].get<bool>()) s.violation(fmt::format("rep {}: post-patch audit failed", rep));
      audit["rep"] = rep;
      audits.push_back(std::move(audit));
    }
  }
  io::write_json(cfg.out / "audit.json", audits);
  s.write();
  return s.exit_code();
}

AggregationConfig aggregation_config(const RunConfig& cfg, std::uint64_t seed) {
  AggregationConfig ac;
  ac.seed = seed;
  if (cfg.task == Task::seq && cfg.method == "random") ac.pick_policy = PickPolicy::random;
  if (cfg.task == Task::seq && cfg.method == "given") ac.order_policy = OrderPolicy::given;
  return ac;
}

json sequential_json(const SequentialResult& seq, const ModelSet& ms, const Dataset& d) {
  json order = json::array();
  for (auto k : seq.order) order.push_back(ms.labels()[k]);
  json survivors = json::array();
  for (const auto& f : seq.survivors) survivors.push_back(brier_score(f, d));
  return {{"order", order},
          {"picked", seq.picked},
          {"survivor_brier", survivors},
          {"final_brier", brier_score(seq.survivor, d)},
          {"stages", seq.stages.size()},
          {"total_rounds", seq.total_rounds()},
          {"round_cap", seq.round_cap}};
}

int task_seq(const RunConfig& cfg) {
  Session s(cfg);
  const auto in = load_inputs(cfg, 0, 2);
  json reps = json::array();
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const auto ac = aggregation_config(cfg, cfg.seed + static_cast<std::uint64_t>(rep));
    const auto seq = sequential_reconcile(in.ms, in.d, cfg.params(), ac);
    for (std::size_t j = 0; j < seq.stages.size(); ++j) s.record(seq.stages[j], rep, fmt::format("stage_{}", j));
    if (ac.pick_policy == PickPolicy::lower_brier) {
      double best = brier_score(in.ms[seq.order[0]], in.d);
      for (std::size_t j = 0; j < seq.survivors.size(); ++j) {
        best = std::min(best, brier_score(in.ms[seq.order[j + 1]], in.d));
        if (brier_score(seq.survivors[j], in.d) > best + kBoundTolerance) {
          s.violation(fmt::format("rep {} stage {}: survivor is worse than the best processed model", rep, j));
        }
      }
    }
    auto j = sequential_json(seq, in.ms, in.d);
    j["rep"] = rep;
    reps.push_back(std::move(j));
  }
  io::write_json(cfg.out / "seq.json", reps);
  s.write();
  return s.exit_code();
}

int task_aggregate(const RunConfig& cfg) {
  Session s(cfg);
  const auto in = load_inputs(cfg, 0, 1);
  const auto params = cfg.params();
  const auto chosen = parse_aggregation_method(cfg.method.empty() ? "sequential_reconcile" : cfg.method);
  std::string table = "rep,method,brier\n";
  ModelSet out_models;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    auto ac = aggregation_config(cfg, cfg.seed + static_cast<std::uint64_t>(rep));
    for (auto m : {AggregationMethod::mode, AggregationMethod::mean, AggregationMethod::randomized,
                   AggregationMethod::random_select, AggregationMethod::sequential_reconcile}) {
      ac.method = m;
      Predictor f;
      if (m == AggregationMethod::sequential_reconcile && in.ms.size() >= 2) {
        const auto seq = sequential_reconcile(in.ms, in.d, params, ac);
        for (std::size_t j = 0; j < seq.stages.size(); ++j) s.record(seq.stages[j], rep, fmt::format("stage_{}", j));
        f = seq.survivor;
      } else {
        f = aggregate(in.ms, in.d, params, ac);
      }
      table += fmt::format("{},{},{}\n", rep, to_string(m), num(brier_score(f, in.d)));
      if (m == chosen) out_models.add(f, fmt::format("{}_rep{}", to_string(m), rep));
    }
  }
  io::write_text(cfg.out / "aggregate.csv", table);
  io::save_predictions(cfg.out / "aggregated.csv", out_models, in.d.ids());
  s.write();
  return s.exit_code();
}

int task_metrics(const RunConfig& cfg) {
  Session s(cfg);
  const auto in = load_inputs(cfg, 0, 1);
  const auto params = cfg.params();
  json report = {{"original", io::to_json(multiplicity_report(in.ms, params.epsilon))}};
  if (in.ms.size() >= 2) {
    io::write_pair_mass_csv(cfg.out / "pair_mass.csv", pairwise_disagreement(in.ms, params.epsilon, &in.d.measure()),
                            in.ms.labels());
  } else {
    std::cerr << "note: a single model has no discrepancy or pairwise disagreement; reported as n/a\n";
  }

  if (!cfg.method.empty()) {
    if (in.ms.size() < 2) throw InputError("reconciled sets need at least two models");
    const double base_ambiguity = ambiguity(in.ms);
    json sets = json::object();
    json tests = json::object();
    for (char c : cfg.method) {
      const auto method = parse_set_method(c);
      std::vector<double> base, reduced;
      json per_rep = json::array();
      for (int rep = 0; rep < cfg.reps; ++rep) {
        const auto set = build_reconciled_set(in.ms, in.d, params, method, cfg.seed + static_cast<std::uint64_t>(rep));
        for (std::size_t k = 0; k < set.runs.size(); ++k) {
          s.record(set.runs[k], rep, fmt::format("set_{}_{}", c, k));
        }
        auto r = io::to_json(multiplicity_report(set.models, params.epsilon));
        r["rep"] = rep;
        r["size"] = set.models.size();
        per_rep.push_back(std::move(r));
        base.push_back(base_ambiguity);
        reduced.push_back(ambiguity(set.models));
      }
      sets[std::string(1, c)] = per_rep;
      try {
        const auto t = paired_t_test(base, reduced);
        tests[std::string(1, c)] = {{"metric", "ambiguity"}, {"t", t.t}, {"df", t.df}, {"p", t.p},
                                    {"mean_diff", t.mean_diff}};
      } catch (const DegenerateInputError& e) {
        tests[std::string(1, c)] = {{"metric", "ambiguity"}, {"result", "n/a"}, {"reason", e.what()}};
      }
    }
    report["reconciled"] = sets;
    report["ttest"] = tests;
  }
  io::write_json(cfg.out / "metrics.json", report);
  s.write();
  return s.exit_code();
}

int task_cate(const RunConfig& cfg) {
  Session s(cfg);
  const auto cd = io::load_causal(cfg.labels);
  auto all = io::load_estimators(cfg.predictions, cd.n_cells(), cfg.effective_range());
  std::vector<CateEstimatorVector> est;
  if (cfg.models.empty()) {
    est = all;
  } else {
    for (const auto& name : cfg.models) {
      auto it = std::find_if(all.begin(), all.end(), [&](const auto& e) { return e.label == name; });
      if (it == all.end()) throw InputError(fmt::format("estimator file has no column '{}'", name));
      est.push_back(*it);
    }
  }
  if (est.size() < 2) throw InputError("task 'cate' needs two estimator columns");

  const auto weighting = cfg.weighting == "by_cell_size" ? CellWeighting::by_cell_size : CellWeighting::uniform;
  const auto pd = build_pseudo_dataset(cd, weighting);
  const auto params = cfg.params();
  const auto red = reconcile_cate(est[0], est[1], pd, params);
  const auto unit = reconcile_cate_unit_level(est[0], est[1], cd, params);
  s.record(red, 0, "reduction");
  s.record(unit, 0, "unit_level");

  const auto a_red = expand_to_cells(pd, red.f1_final, est[0]);
  const auto b_red = expand_to_cells(pd, red.f2_final, est[1]);
  CateEstimatorVector a_unit{std::vector<double>(unit.f1_final.values().begin(), unit.f1_final.values().end()),
                             est[0].range, est[0].label + "_unit_level"};
  CateEstimatorVector b_unit{std::vector<double>(unit.f2_final.values().begin(), unit.f2_final.values().end()),
                             est[1].range, est[1].label + "_unit_level"};
  auto a_red_l = a_red;
  auto b_red_l = b_red;
  a_red_l.label += "_reduction";
  b_red_l.label += "_reduction";
  io::save_estimators(cfg.out / "reconciled_estimates.csv", {a_red_l, b_red_l, a_unit, b_unit});

  json j = {{"weighting", cfg.weighting},
            {"cells", pd.n_cells},
            {"included_cells", pd.size()},
            {"excluded_cells", pd.excluded_cells},
            {"cate_brier",
             {{"a_initial", cate_brier(est[0], pd)},
              {"b_initial", cate_brier(est[1], pd)},
              {"a_reduction", cate_brier(a_red, pd)},
              {"b_reduction", cate_brier(b_red, pd)},
              {"a_unit_level", cate_brier(a_unit, pd)},
              {"b_unit_level", cate_brier(b_unit, pd)}}}};
  if (!red.trace.empty() && !unit.trace.empty()) {
    j["round1_delta_raw"] = {{"reduction", red.trace[0].delta_raw}, {"unit_level", unit.trace[0].delta_raw}};
  }
  io::write_json(cfg.out / "cate.json", j);
  s.write();
  return s.exit_code();
}

int task_fairness(const RunConfig& cfg) {
  Session s(cfg);
  const auto in = load_inputs(cfg, 2, 2);
  auto group = [&](const std::string& name) {
    const auto& groups = in.d.groups();
    auto it = groups.find(name);
    if (it == groups.end()) throw InputError(fmt::format("label file has no column 'group_{}'", name));
    return it->second;
  };
  FairnessConfig fc;
  fc.seed = cfg.seed;
  fc.corrupt = cfg.method != "no_corrupt";
  if (!cfg.majority.empty()) fc.majority = group(cfg.majority);
  const auto rep = fairness_experiment(in.ms[0], in.ms[1], in.d, group(cfg.minority), cfg.params(), fc);
  s.record(rep.run, 0, "fairness");
  if (!rep.applicable) {
    std::cerr << fmt::format("note: minority mass {} is below {}; the subgroup bound is reported but not enforced\n",
                             rep.minority_mass, rep.slack);
  } else if (!rep.bound_satisfied) {
    s.violation(fmt::format("minority Brier {} exceeds the subgroup bound {}", rep.at(2, Phase::after, Cohort::minority),
                            rep.subgroup_bound));
  }
  io::write_json(cfg.out / "fairness.json", io::to_json(rep));
  io::write_fairness_csv(cfg.out / "fairness.csv", rep);
  s.write();
  return s.exit_code();
}

int task_robustness(const RunConfig& cfg) {
  Session s(cfg);
  const auto in = load_inputs(cfg, 0, 1);
  std::vector<std::size_t> ks = cfg.k_values;
  if (ks.empty()) {
    for (std::size_t k = 0; k <= in.ms.size(); ++k) ks.push_back(k);
  }
  std::vector<SweepRow> rows;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    auto part = robustness_sweep(in.ms, in.d, cfg.params(), ks, cfg.seed + static_cast<std::uint64_t>(rep));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  io::write_sweep_csv(cfg.out / "sweep.csv", rows);
  s.write();
  return s.exit_code();
}

int task_synth(const RunConfig& cfg) {
  Session s(cfg);
  const auto range = cfg.effective_range();
  if (!(range == Interval{0.0, 1.0})) throw ParameterError("synthetic prediction data uses the [0, 1] range");
  const auto gt = synth::gen_ground_truth(cfg.n, cfg.seed);

  synth::PairSpec spec;
  spec.seed = cfg.seed;
  spec.dis_epsilon = cfg.effective_epsilon();
  spec.min_disagreement_mass = cfg.effective_alpha();
  if (cfg.method == "disjoint_rows") spec.strategy = synth::PairStrategy::disjoint_rows;
  else if (cfg.method == "disjoint_features") spec.strategy = synth::PairStrategy::disjoint_features;
  else if (!cfg.method.empty() && cfg.method != "perturb_regions") {
    throw ParameterError(fmt::format("unknown pair strategy '{}'", cfg.method));
  }
  const auto pair = synth::gen_model_pair(gt.f_star, gt.data, spec);
  const auto cls = synth::gen_model_class(gt.f_star, cfg.n_models, cfg.seed);

  const auto sc = synth::gen_synthetic_causal(50, 200, synth::EffectPrior{}, cfg.seed);
  auto [ea, eb] = synth::gen_estimator_pair(sc.true_tau, 10, 0.4, 0.02, cfg.seed);

  io::save_labels(cfg.out / "labels.csv", gt.data);
  io::save_predictions(cfg.out / "predictions.csv", ModelSet({pair.f1, pair.f2}, {"model_1", "model_2"}),
                       gt.data.ids());
  io::save_predictions(cfg.out / "models.csv", cls, gt.data.ids());
  io::save_predictions(cfg.out / "truth.csv", ModelSet({gt.f_star}, {"f_star"}), gt.data.ids());
  io::save_causal(cfg.out / "causal.csv", sc.data);
  io::save_estimators(cfg.out / "estimators.csv",
                      {ea, eb, CateEstimatorVector{sc.true_tau, {-1.0, 1.0}, "true_tau"}});

  io::write_json(cfg.out / "synth.json",
                 {{"n", cfg.n},
                  {"strategy", synth::to_string(spec.strategy)},
                  {"attempts", pair.attempts},
                  {"brier", {brier_score(pair.f1, gt.data), brier_score(pair.f2, gt.data)}},
                  {"disagreement_mass", disagreement_mass(pair.f1, pair.f2, spec.dis_epsilon, gt.data.measure())},
                  {"class_size", cls.size()},
                  {"causal_cells", sc.data.n_cells()},
                  {"causal_units", sc.data.size()}});
  s.write();
  return s.exit_code();
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    cfg.validate();
    switch (cfg.task) {
      case Task::reconcile: return task_reconcile(cfg);
      case Task::seq: return task_seq(cfg);
      case Task::aggregate: return task_aggregate(cfg);
      case Task::metrics: return task_metrics(cfg);
      case Task::cate: return task_cate(cfg);
      case Task::fairness: return task_fairness(cfg);
      case Task::robustness: return task_robustness(cfg);
      case Task::synth: return task_synth(cfg);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace recon
