#include <doctest.h>

#include "oracles.hpp"
#include "reconcile/maaudit.hpp"

using namespace recon;

TEST_CASE("ma gap") {
  const auto all = GroupIndicator::all(2);
  CHECK(ma_gap(Predictor({0.0, 1.0}), Dataset({1, 0}), all) == 0.0);
  CHECK(ma_gap(Predictor({0.5, 0.5}), Dataset({1, 1}), all) == doctest::Approx(0.25));
  CHECK(ma_gap(Predictor({1.0, 0.0}), Dataset({1, 0}), all) == 0.0);
  CHECK_THROWS_AS(ma_gap(Predictor({0.5, 0.5}), Dataset({1, 1}), GroupIndicator::none(2)), EmptyGroupError);
}

TEST_CASE("empty trace") {
  const Dataset d({1, 0});
  auto res = reconcile(Predictor({0.6, 0.4}), Predictor({0.6, 0.4}), d, ReconcileParams{});
  auto rep = audit_trace(res, d, 0.05 * 0.04);
  CHECK(rep.per_group.empty());
  CHECK(rep.max_excess == 0.0);
  CHECK(rep.post_patch.empty());
}

TEST_CASE("hand trace audit") {
  const Dataset d({1, 1, 0, 0});
  const ReconcileParams params{0.1, 0.2};
  auto res = reconcile(Predictor({0.9, 0.9, 0.1, 0.1}), Predictor({0.1, 0.1, 0.1, 0.1}), d, params);
  REQUIRE(res.rounds() == 1);
  auto rep = audit_trace(res, d, params.alpha * params.epsilon * params.epsilon);
  REQUIRE(rep.per_group.size() == 2);
  // final f2 on {0,1} is [1,1] against labels [1,1]
  CHECK(rep.per_group[1].audited_model == 2);
  CHECK(rep.per_group[1].gap == 0.0);
  CHECK_FALSE(rep.per_group[1].violated);
  REQUIRE(rep.post_patch.size() == 1);
  // before clamping the patched values are 0.1 + 29/32 = 1.00625
  CHECK(rep.post_patch[0].gap == doctest::Approx(0.00625 * 0.00625));
  CHECK(rep.post_patch[0].gap_projected == 0.0);
  CHECK(rep.post_patch[0].holds);
  CHECK(rep.replay_matches);
}

TEST_CASE("post-patch identity on random runs") {
  const ReconcileParams params{0.05, 0.2};
  const double beta = params.alpha * params.epsilon * params.epsilon;
  for (std::uint64_t s = 0; s < 40; ++s) {
    auto inst = oracle::random_instance(400, 500 + s);
    const Dataset d(inst.y);
    auto res = reconcile(Predictor(inst.f1), Predictor(inst.f2), d, params);
    auto rep = audit_trace(res, d, beta);
    CHECK(rep.post_patch.size() == static_cast<std::size_t>(res.rounds()));
    CHECK(rep.post_patch_ok);
    CHECK(rep.replay_matches);
    CHECK(rep.per_group.size() == 2 * res.trace.size());
    for (const auto& a : rep.per_group) CHECK(a.bound > 0.0);
  }
}
