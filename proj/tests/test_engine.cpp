#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "reconcile/engine.hpp"

using namespace recon;

namespace {

const Dataset kFourPoint({1, 1, 0, 0});
const Predictor kF1({0.9, 0.9, 0.1, 0.1});
const Predictor kF2({0.1, 0.1, 0.1, 0.1});

bool same_values(const Predictor& a, const Predictor& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return a.size() == b.size();
}

}  // namespace

TEST_CASE("default grid size") {
  CHECK(default_grid_size(0.1, 0.2) == 32);
  ReconcileParams p{0.1, 0.2};
  CHECK(p.grid_size() == 32);
  p.grid = 50;
  CHECK(p.grid_size() == 50);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((ReconcileParams{0.0, 0.2}.validate()), ParameterError);
  CHECK_THROWS_AS((ReconcileParams{0.1, 0.0}.validate()), ParameterError);
  CHECK_THROWS_AS((ReconcileParams{1.5, 0.2}.validate()), ParameterError);
  CHECK_NOTHROW((ReconcileParams{1.0, 1.0}.validate()));
}

TEST_CASE("round bound arithmetic") {
  CHECK(round_bound(0.25, 0.25, 0.05, 0.2) == doctest::Approx(4000.0));
  CHECK(per_round_improvement(0.05, 0.2) == doctest::Approx(0.000125));
}

TEST_CASE("select_update") {
  SUBCASE("hand example") {
    auto sel = select_update(kF1, kF2, kFourPoint, 0.2);
    CHECK(sel.model == 2);
    CHECK(sel.direction == Direction::greater);
    CHECK(sel.group == GroupIndicator(std::vector<bool>{true, true, false, false}));
    CHECK(sel.score == doctest::Approx(0.405));
  }
  SUBCASE("swapping the models mirrors the choice") {
    auto sel = select_update(kF2, kF1, kFourPoint, 0.2);
    CHECK(sel.model == 1);
    CHECK(sel.direction == Direction::less);
    CHECK(sel.score == doctest::Approx(0.405));
  }
  SUBCASE("one-sided disagreement never selects the empty side") {
    for (int rep = 0; rep < 50; ++rep) {
      auto inst = oracle::random_instance(200, 900 + rep);
      std::vector<double> hi(inst.f1);
      for (auto& v : hi) v = std::fmin(1.0, v + 0.5);
      auto sel = select_update(Predictor(hi), Predictor(inst.f1), Dataset(inst.y), 0.2);
      CHECK(sel.direction == Direction::greater);
    }
  }
}

TEST_CASE("identical inputs run zero rounds") {
  auto res = reconcile(kF1, kF1, kFourPoint, ReconcileParams{0.1, 0.2});
  CHECK(res.rounds() == 0);
  CHECK(res.trace.empty());
  CHECK(res.converged());
  CHECK(res.f1_final == kF1);
  CHECK(res.f2_final == kF1);
}

TEST_CASE("hand-traced four point instance") {
  auto res = reconcile(kF1, kF2, kFourPoint, ReconcileParams{0.1, 0.2});
  auto ref = oracle::reconcile({0.9, 0.9, 0.1, 0.1}, {0.1, 0.1, 0.1, 0.1}, {1, 1, 0, 0}, 0.1, 0.2);

  REQUIRE(ref.steps.size() == 1);
  REQUIRE(res.trace.size() == 1);
  CHECK(res.grid == 32);
  CHECK(res.t1 == 0);
  CHECK(res.t2 == 1);
  CHECK(res.converged());

  const auto& r = res.trace[0];
  CHECK(r.patched_model == 2);
  CHECK(r.direction == Direction::greater);
  CHECK(r.delta_raw == ref.steps[0].delta_raw);
  CHECK(r.delta_raw == 1.0 - 0.1);
  CHECK(r.delta == 29.0 / 32.0);
  CHECK(r.group_mass == 0.5);
  CHECK(r.brier_before == doctest::Approx(0.41).epsilon(1e-14));
  CHECK(r.brier_after == doctest::Approx(0.005).epsilon(1e-14));
  CHECK(res.f2_final == Predictor({1.0, 1.0, 0.1, 0.1}));
  CHECK(same_values(res.f2_final, Predictor(ref.f2)));
  CHECK(res.f1_final == kF1);
}

TEST_CASE("round cap is surfaced") {
  ReconcileParams p{0.1, 0.2};
  p.max_rounds = 0;
  auto res = reconcile(kF1, kF2, kFourPoint, p);
  CHECK(res.terminated_by == Termination::round_cap);
  CHECK(res.rounds() == 0);
}

TEST_CASE("alignment errors") {
  CHECK_THROWS_AS(reconcile(kF1, Predictor({0.5}), kFourPoint, ReconcileParams{}), AlignmentError);
}

TEST_CASE("engine matches the reference loop and satisfies every bound on random instances") {
  const double alpha = 0.05;
  const double eps = 0.2;
  const ReconcileParams params{alpha, eps};
  const double step = per_round_improvement(alpha, eps);
  int total_rounds = 0;

  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto inst = oracle::random_instance(300, seed);
    Dataset d(inst.y);
    Predictor f1(inst.f1), f2(inst.f2);
    auto res = reconcile(f1, f2, d, params);
    auto ref = oracle::reconcile(inst.f1, inst.f2, inst.y, alpha, eps);
    const int m = res.grid;

    REQUIRE(res.converged());
    REQUIRE(res.trace.size() == ref.steps.size());
    total_rounds += res.rounds();
    for (std::size_t k = 0; k < ref.steps.size(); ++k) {
      const auto& r = res.trace[k];
      CHECK(r.t == static_cast<int>(k));
      CHECK(r.patched_model == ref.steps[k].model);
      CHECK(symbol(r.direction) == ref.steps[k].dir);
      CHECK(r.delta_raw == doctest::Approx(ref.steps[k].delta_raw).epsilon(1e-12));
      CHECK(r.delta == ref.steps[k].delta);
      CHECK(std::fabs(r.delta_raw - r.delta) <= 1.0 / (2.0 * m));
      CHECK(r.brier_before - r.brier_after >= step - kBoundTolerance);
      CHECK(r.disagreement_mass_before >= alpha);
    }
    for (std::size_t i = 0; i < inst.y.size(); ++i) {
      CHECK(res.f1_final[i] == doctest::Approx(ref.f1[i]).epsilon(1e-12));
      CHECK(res.f2_final[i] == doctest::Approx(ref.f2[i]).epsilon(1e-12));
    }

    // Round bound, per-model improvement, final mass and the Brier-gap corollary.
    CHECK(res.rounds() <= round_bound(res.brier1_initial, res.brier2_initial, alpha, eps));
    CHECK(res.brier1_final <= res.brier1_initial - res.t1 * step + kBoundTolerance);
    CHECK(res.brier2_final <= res.brier2_initial - res.t2 * step + kBoundTolerance);
    CHECK(res.disagreement_final < alpha);
    CHECK(std::fabs(res.brier1_final - res.brier2_final) <= 4 * eps + 3 * alpha + kBoundTolerance);
    CHECK(res.t1 + res.t2 == static_cast<int>(res.trace.size()));

    // Rows that never enter a witnessing group keep their inputs bit-for-bit.
    std::vector<bool> touched(inst.y.size(), false);
    for (const auto& r : res.trace) {
      for (std::size_t i = 0; i < touched.size(); ++i) touched[i] = touched[i] || r.group[i];
    }
    for (std::size_t i = 0; i < touched.size(); ++i) {
      if (!touched[i]) {
        CHECK(res.f1_final[i] == inst.f1[i]);
        CHECK(res.f2_final[i] == inst.f2[i]);
      }
      // Rows agreeing at the start are never patched, so they agree throughout.
      if (std::fabs(inst.f1[i] - inst.f2[i]) <= eps) CHECK_FALSE(touched[i]);
    }

    // Determinism.
    auto again = reconcile(f1, f2, d, params);
    CHECK(again.f1_final == res.f1_final);
    CHECK(again.f2_final == res.f2_final);
    REQUIRE(again.trace.size() == res.trace.size());
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
      CHECK(again.trace[k].delta_raw == res.trace[k].delta_raw);
      CHECK(again.trace[k].group == res.trace[k].group);
    }
  }
  CHECK(total_rounds > 0);
}

TEST_CASE("weighted objective keeps the per-round guarantee") {
  const double alpha = 0.02;
  const double eps = 0.1;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto inst = oracle::random_instance(120, 500 + seed);
    Dataset d(inst.y);
    std::vector<double> w(inst.y.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 + static_cast<double>((i * 7 + seed) % 5);
    d.set_weights(w);
    auto res = reconcile(Predictor(inst.f1), Predictor(inst.f2), d, ReconcileParams{alpha, eps});
    CHECK(res.converged());
    CHECK(res.disagreement_final < alpha);
    for (const auto& r : res.trace) {
      CHECK(r.brier_before - r.brier_after >= per_round_improvement(alpha, eps) - kBoundTolerance);
    }
  }
}
