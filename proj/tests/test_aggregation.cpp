#include <doctest.h>

#include <cmath>

#include "reconcile/aggregation.hpp"
#include "reconcile/synth.hpp"

using namespace recon;

namespace {

bool member_of(const Predictor& f, const ModelSet& ms) {
  for (const auto& m : ms.models()) {
    if (m == f) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("model set validation") {
  ModelSet ms({Predictor({0.1, 0.2}), Predictor({0.3, 0.4})});
  CHECK(ms.size() == 2);
  CHECK(ms.labels()[1] == "model_1");
  CHECK_THROWS_AS(ms.add(Predictor({0.1}), "short"), AlignmentError);
  CHECK_THROWS_AS(ms.add(Predictor({0.1, 0.2}, {-1.0, 1.0}), "other range"), ParameterError);
  CHECK_THROWS_AS(mode_aggregate(ModelSet{}), ParameterError);
  CHECK_THROWS_AS(mean_aggregate(ModelSet{}), ParameterError);
  CHECK_THROWS_AS(randomized_prediction(ModelSet{}, 1), ParameterError);
  CHECK_THROWS_AS(random_model_select(ModelSet{}, 1), ParameterError);
}

TEST_CASE("mode aggregation") {
  CHECK(mode_aggregate(ModelSet({Predictor({0.7, 0.2, 0.5})})) == Predictor({1.0, 0.0, 1.0}));
  ModelSet three({Predictor({0.9}), Predictor({0.8}), Predictor({0.1})});
  CHECK(mode_aggregate(three)[0] == 1.0);
  ModelSet tie({Predictor({0.9}), Predictor({0.1})});
  CHECK(mode_aggregate(tie)[0] == 1.0);
  CHECK_THROWS_AS(mode_aggregate(tie, 1.0), ParameterError);
}

TEST_CASE("mean aggregation") {
  CHECK(mean_aggregate(ModelSet({Predictor({0.2}), Predictor({0.6})}))[0] == doctest::Approx(0.4));
  ModelSet same({Predictor({0.3, 0.7}), Predictor({0.3, 0.7})});
  CHECK(mean_aggregate(same) == Predictor({0.3, 0.7}));
  ModelSet a({Predictor({0.1, 0.9}), Predictor({0.5, 0.2}), Predictor({0.8, 0.4})});
  ModelSet b({Predictor({0.8, 0.4}), Predictor({0.1, 0.9}), Predictor({0.5, 0.2})});
  auto ma = mean_aggregate(a);
  auto mb = mean_aggregate(b);
  for (std::size_t i = 0; i < 2; ++i) CHECK(ma[i] == doctest::Approx(mb[i]));
}

TEST_CASE("randomized prediction") {
  ModelSet one({Predictor({0.1, 0.2, 0.3})});
  CHECK(randomized_prediction(one, 7) == one[0]);

  const std::size_t n = 10000;
  const std::size_t k = 4;
  std::vector<Predictor> models;
  for (std::size_t j = 0; j < k; ++j) models.emplace_back(std::vector<double>(n, 0.1 * static_cast<double>(j + 1)));
  ModelSet ms(std::move(models));
  auto out = randomized_prediction(ms, 42);
  CHECK(out == randomized_prediction(ms, 42));

  std::vector<double> counts(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) counts[static_cast<std::size_t>(std::lround(out[i] * 10.0)) - 1] += 1.0;
  const double p = 1.0 / static_cast<double>(k);
  const double sigma = std::sqrt(static_cast<double>(n) * p * (1.0 - p));
  for (double c : counts) CHECK(std::fabs(c - static_cast<double>(n) * p) <= 5.0 * sigma);
}

TEST_CASE("random model selection") {
  ModelSet one({Predictor({0.4})});
  CHECK(random_model_select(one, 3) == one[0]);
  ModelSet ms({Predictor({0.1, 0.2}), Predictor({0.3, 0.4}), Predictor({0.5, 0.6})});
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto f = random_model_select(ms, s);
    CHECK(member_of(f, ms));
    CHECK(f == random_model_select(ms, s));
  }
}

TEST_CASE("sequential reconcile") {
  auto gt = synth::gen_ground_truth(600, 5);
  const ReconcileParams params{0.05, 0.2};

  SUBCASE("needs two models") {
    CHECK_THROWS_AS(sequential_reconcile(ModelSet({gt.f_star}), gt.data, params, {}), ParameterError);
  }

  SUBCASE("two models give a single stage") {
    auto ms = synth::gen_model_class(gt.f_star, 2, 9);
    auto res = sequential_reconcile(ms, gt.data, params, {});
    CHECK(res.stages.size() == 1);
    const auto& st = res.stages[0];
    const auto& expect = st.brier2_final < st.brier1_final ? st.f2_final : st.f1_final;
    CHECK(res.survivor == expect);
  }

  SUBCASE("identical models need no rounds") {
    ModelSet ms({gt.f_star, gt.f_star, gt.f_star});
    auto res = sequential_reconcile(ms, gt.data, params, {});
    CHECK(res.total_rounds() == 0);
    CHECK(res.survivor == gt.f_star);
  }

  SUBCASE("chain length and determinism") {
    auto ms = synth::gen_model_class(gt.f_star, 5, 11);
    AggregationConfig cfg;
    cfg.seed = 17;
    auto a = sequential_reconcile(ms, gt.data, params, cfg);
    auto b = sequential_reconcile(ms, gt.data, params, cfg);
    CHECK(a.stages.size() == 4);
    CHECK(a.survivor == b.survivor);
    CHECK(a.order == b.order);
    CHECK_FALSE(a.round_cap);
  }

  SUBCASE("accurate model survives a random partner") {
    const double slack = 4 * params.epsilon + 3 * params.alpha;
    for (std::uint64_t s = 0; s < 10; ++s) {
      auto rnd = synth::gen_random_predictor(gt.data.size(), {0.0, 1.0}, 100 + s);
      ModelSet ms({gt.f_star, rnd});
      AggregationConfig cfg;
      cfg.seed = s;
      auto res = sequential_reconcile(ms, gt.data, params, cfg);
      CHECK(brier_score(res.survivor, gt.data) <= brier_score(gt.f_star, gt.data) + slack);
    }
  }

  SUBCASE("lower-Brier chain stays within the induction bound") {
    const double slack = 4 * params.epsilon + 3 * params.alpha;
    for (std::uint64_t s = 0; s < 8; ++s) {
      auto ms = synth::gen_model_class(gt.f_star, 4, 200 + s);
      AggregationConfig cfg;
      cfg.seed = s;
      auto res = sequential_reconcile(ms, gt.data, params, cfg);
      double best = INFINITY;
      for (std::size_t j = 0; j < res.order.size(); ++j) {
        best = std::min(best, brier_score(ms[res.order[j]], gt.data));
        if (j >= 1) CHECK(brier_score(res.survivors[j - 1], gt.data) <= best + slack * static_cast<double>(j));
      }
      for (const auto& st : res.stages) {
        CHECK(st.converged());
        CHECK(std::fabs(st.brier1_final - st.brier2_final) <= slack);
      }
    }
  }
}

TEST_CASE("aggregate dispatch") {
  auto gt = synth::gen_ground_truth(200, 1);
  auto ms = synth::gen_model_class(gt.f_star, 3, 2);
  const ReconcileParams params{0.05, 0.2};
  AggregationConfig cfg;
  cfg.method = AggregationMethod::mean;
  CHECK(aggregate(ms, gt.data, params, cfg) == mean_aggregate(ms));
  cfg.method = AggregationMethod::mode;
  CHECK(aggregate(ms, gt.data, params, cfg) == mode_aggregate(ms));
  CHECK(parse_aggregation_method("random_select") == AggregationMethod::random_select);
  CHECK_THROWS_AS(parse_aggregation_method("median"), ParameterError);
}

TEST_CASE("robustness sweep") {
  auto gt = synth::gen_ground_truth(500, 3);
  auto ms = synth::gen_model_class(gt.f_star, 4, 8);
  const ReconcileParams params{0.05, 0.2};
  auto rows = robustness_sweep(ms, gt.data, params, {0, 3, 4}, 21);
  REQUIRE(rows.size() == 9);

  // k = 0 reproduces the clean aggregators
  CHECK(rows[0].method == "mode");
  CHECK(rows[0].mse == doctest::Approx(brier_score(mode_aggregate(ms), gt.data)));
  CHECK(rows[1].mse == doctest::Approx(brier_score(mean_aggregate(ms), gt.data)));

  // k = |ms| - 1 leaves one accurate model in the chain
  const double slack = 4 * params.epsilon + 3 * params.alpha;
  double worst_clean = 0.0;
  for (const auto& f : ms.models()) worst_clean = std::max(worst_clean, brier_score(f, gt.data));
  CHECK(rows[5].method == "sequential_reconcile");
  CHECK(rows[5].mse <= worst_clean + slack);

  // all random: sequential reconcile is worse than with clean inputs
  CHECK(rows[8].mse > rows[2].mse);
  CHECK(rows == robustness_sweep(ms, gt.data, params, {0, 3, 4}, 21));
  CHECK_THROWS_AS(robustness_sweep(ms, gt.data, params, {5}, 1), ParameterError);
}
