#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "reconcile/multiplicity.hpp"
#include "reconcile/synth.hpp"

using namespace recon;

TEST_CASE("ambiguity") {
  CHECK(ambiguity(ModelSet({Predictor({0.2, 0.9})})) == 0.0);
  ModelSet two({Predictor({0.2, 0.8}), Predictor({0.4, 0.4})});
  CHECK(ambiguity(two) == doctest::Approx(0.3));
  ModelSet dup({Predictor({0.2, 0.8}), Predictor({0.4, 0.4}), Predictor({0.4, 0.4})});
  CHECK(ambiguity(dup) == ambiguity(two));
  CHECK_THROWS_AS(ambiguity(ModelSet{}), ParameterError);
}

TEST_CASE("discrepancy") {
  CHECK(discrepancy(ModelSet({Predictor({0.3, 0.6}), Predictor({0.3, 0.6})})) == 0.0);
  ModelSet abc({Predictor({0.0, 0.0}), Predictor({1.0, 1.0}), Predictor({0.5, 0.5})});
  CHECK(discrepancy(abc) == doctest::Approx(1.0));
  CHECK_THROWS_AS(discrepancy(ModelSet({Predictor({0.1})})), ParameterError);
}

TEST_CASE("prediction variance") {
  auto same = prediction_variance_stats(ModelSet({Predictor({0.3, 0.6}), Predictor({0.3, 0.6})}));
  CHECK(same.max == 0.0);
  CHECK(same.mean == 0.0);
  auto one_row = prediction_variance_stats(ModelSet({Predictor({0.0, 0.5}), Predictor({1.0, 0.5})}));
  CHECK(one_row.max == doctest::Approx(0.25));
  CHECK(one_row.min == 0.0);
  CHECK(one_row.mean == doctest::Approx(0.125));
  CHECK(one_row.std == doctest::Approx(0.125));
  auto single = prediction_variance_stats(ModelSet({Predictor({0.2, 0.4})}));
  CHECK(single.max == 0.0);
}

TEST_CASE("pairwise disagreement") {
  ModelSet same({Predictor({0.3, 0.6}), Predictor({0.3, 0.6}), Predictor({0.3, 0.6})});
  auto s = pairwise_disagreement_stats(same, 0.2);
  CHECK(s.count == 3);
  CHECK(s.max == 0.0);
  auto pairs = pairwise_disagreement(ModelSet({Predictor({0.1, 0.5, 0.9}), Predictor({0.5, 0.5, 0.2})}), 0.2);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].mass == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(pairwise_disagreement(ModelSet({Predictor({0.1})}), 0.2), ParameterError);

  auto report = multiplicity_report(ModelSet({Predictor({0.1})}), 0.2);
  CHECK(report.ambiguity == 0.0);
  CHECK_FALSE(report.discrepancy.has_value());
  CHECK_FALSE(report.disagreement_stats.has_value());
}

TEST_CASE("reconciled set construction") {
  auto gt = synth::gen_ground_truth(400, 12);
  const ReconcileParams params{0.05, 0.2};
  auto ms4 = synth::gen_model_class(gt.f_star, 4, 3);

  CHECK(build_reconciled_set(ms4, gt.data, params, SetMethod::a, 1).models.size() == 12);
  CHECK(build_reconciled_set(ms4, gt.data, params, SetMethod::b, 1).models.size() == 6);
  auto c = build_reconciled_set(ms4, gt.data, params, SetMethod::c, 1);
  CHECK(c.models.size() == 4);
  CHECK(c.models.labels() == build_reconciled_set(ms4, gt.data, params, SetMethod::c, 1).models.labels());
  CHECK(build_reconciled_set(synth::gen_model_class(gt.f_star, 2, 3), gt.data, params, SetMethod::b, 1)
            .models.size() == 1);

  auto d = build_reconciled_set(ms4, gt.data, params, SetMethod::d, 1);
  CHECK(d.models.size() == 4);
  CHECK(d.runs.size() == 3);

  ModelSet same({gt.f_star, gt.f_star, gt.f_star});
  auto ds = build_reconciled_set(same, gt.data, params, SetMethod::d, 5);
  CHECK(ds.models.size() == 3);
  int rounds = 0;
  for (const auto& r : ds.runs) rounds += r.rounds();
  CHECK(rounds == 0);

  CHECK(parse_set_method('c') == SetMethod::c);
  CHECK_THROWS_AS(parse_set_method('e'), ParameterError);
}

TEST_CASE("chain reduces ambiguity") {
  const ReconcileParams params{0.05, 0.2};
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto gt = synth::gen_ground_truth(800, 40 + s);
    auto ms = synth::gen_model_class(gt.f_star, 8, 60 + s);
    auto d = build_reconciled_set(ms, gt.data, params, SetMethod::d, s);
    CHECK(ambiguity(d.models) < ambiguity(ms));
    for (const auto& run : d.runs) CHECK(run.disagreement_final < params.alpha);
  }
}

TEST_CASE("paired t-test against reference values") {
  struct Case {
    std::vector<double> xs, ys;
    double t, p;
  };
  // Reference statistics from scipy.stats.ttest_rel.
  const std::vector<Case> cases = {
      {{0.1, 0.2, 0.15, 0.05}, {0, 0, 0, 0}, 3.8729833462074184, 0.03046629166217095},
      {{0.31, 0.28, 0.35, 0.40, 0.22, 0.30}, {0.25, 0.27, 0.30, 0.33, 0.24, 0.26}, 2.5281029148011536,
       0.052651615262554956},
      {{1.5, 2.0, 0.5, 1.0, 3.0, 2.5, 1.2, 0.8}, {1.0, 2.2, 0.1, 0.4, 2.0, 2.6, 0.9, 0.3}, 2.758386421836852,
       0.028161396909008752},
  };
  for (const auto& c : cases) {
    auto r = paired_t_test(c.xs, c.ys);
    CHECK(std::fabs(r.t - c.t) < 1e-6);
    CHECK(std::fabs(r.p - c.p) < 1e-4);
    CHECK(r.t == doctest::Approx(oracle::paired_t(c.xs, c.ys)));
    CHECK(r.df == static_cast<int>(c.xs.size()) - 1);
  }

  std::vector<double> alt = {1, -1, 1, -1, 1, -1};
  std::vector<double> zero(6, 0.0);
  auto sym = paired_t_test(alt, zero);
  CHECK(sym.t == 0.0);
  CHECK(sym.p == doctest::Approx(1.0));

  CHECK_THROWS_AS(paired_t_test(alt, alt), DegenerateInputError);
  CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{0.0}), DegenerateInputError);
  CHECK_THROWS_AS(paired_t_test(alt, std::vector<double>{1.0, 2.0}), AlignmentError);
}
