#include <array>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reconcile/runner.hpp"

namespace {

std::vector<double> parse_reals(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw CLI::ValidationError(flag, "'" + item + "' is not a number");
    out.push_back(v);
  }
  if (out.size() != expected) {
    throw CLI::ValidationError(flag, "expected " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconcile two or more predictors until they agree, and run the surrounding experiments."};
  app.set_version_flag("--version", "reconcile 1.0.0");

  recon::RunConfig cfg;
  std::string task = "reconcile";
  std::string range;
  std::string split;
  double alpha = 0.0;
  double epsilon = 0.0;

  app.add_option("--task", task, "reconcile | seq | aggregate | metrics | cate | fairness | robustness | synth")
      ->check(CLI::IsMember({"reconcile", "seq", "aggregate", "metrics", "cate", "fairness", "robustness", "synth"}));
  auto* alpha_opt = app.add_option("--alpha", alpha, "disagreement mass threshold (default 0.05, cate 0.01)");
  auto* eps_opt = app.add_option("--epsilon", epsilon, "disagreement margin (default 0.2, cate 0.04)");
  app.add_option("--seed", cfg.seed, "base seed; repetition r uses seed + r");
  app.add_option("--range", range, "prediction range lo,hi (default 0,1; cate -1,1)");
  app.add_option("--labels", cfg.labels, "labels CSV (cate: causal CSV id,cell,y,t)");
  app.add_option("--predictions", cfg.predictions, "predictions CSV (cate: estimator CSV)");
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--reps", cfg.reps, "repetitions")->capture_default_str();
  app.add_option("--split", split, "train,validation,test fractions; reconcile on validation, evaluate on test");
  app.add_option("--method", cfg.method,
                 "aggregate: method name; metrics: set methods such as abcd; seq: random | given; "
                 "fairness: no_corrupt; synth: pair strategy");
  app.add_option("--models", cfg.models, "prediction columns to use")->delimiter(',');
  app.add_option("--minority", cfg.minority, "fairness: minority group column suffix")->capture_default_str();
  app.add_option("--majority", cfg.majority, "fairness: majority group column suffix (default: complement)");
  app.add_option("--weighting", cfg.weighting, "cate: uniform | by_cell_size")->capture_default_str();
  app.add_option("--k", cfg.k_values, "robustness: replacement counts")->delimiter(',');
  app.add_option("--n", cfg.n, "synth: rows")->capture_default_str();
  app.add_option("--n-models", cfg.n_models, "synth: model class size")->capture_default_str();
  long max_rounds = 0;
  auto* cap_opt = app.add_option("--max-rounds", max_rounds, "round cap per reconcile call");
  app.add_flag("--real-labels", cfg.real_labels, "labels are real-valued");

  try {
    app.parse(argc, argv);
    cfg.task = recon::parse_task(task);
    if (alpha_opt->count() > 0) cfg.alpha = alpha;
    if (eps_opt->count() > 0) cfg.epsilon = epsilon;
    if (cap_opt->count() > 0) cfg.max_rounds = max_rounds;
    if (!range.empty()) {
      const auto r = parse_reals(range, 2, "--range");
      cfg.range = recon::Interval{r[0], r[1]};
    }
    if (!split.empty()) {
      const auto f = parse_reals(split, 3, "--split");
      cfg.split = std::array<double, 3>{f[0], f[1], f[2]};
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : recon::kExitInput;
  }
  return recon::run(cfg);
}
