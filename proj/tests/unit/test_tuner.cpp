#include <doctest.h>

#include "support.hpp"

using namespace chimera;

namespace {

SearchSpace single_point() {
  SearchSpace s;
  s.alpha = {0.005};
  s.beta = {0.5};
  s.lambda1 = {1e-5};
  s.lambda2 = {1e-4};
  s.rank = {3};
  s.clusters = {3};
  s.budget = 1;
  return s;
}

TuneOptions quick_options() {
  TuneOptions o;
  o.base.max_iters = 40;
  o.base.neg_sample_ratio = 0.0;
  o.kmeans.restarts = 3;
  return o;
}

}  // namespace

TEST_CASE("default space is the published grid") {
  const SearchSpace s;
  CHECK(s.grid_size() == 2u * 5u * 2u * 2u * 5u * 7u);
  CHECK(s.strategy == SearchStrategy::random);
}

TEST_CASE("budget one returns that single configuration") {
  const auto inst = chimera::testing::random_instance(12, 3, 2, 3, 1);
  const TuneResult r = tune(inst.network, single_point(), quick_options());
  REQUIRE(r.trials.size() == 1);
  CHECK(r.best.index == 0);
  CHECK(r.best.clusters == 3);
  CHECK(r.best.hp.rank == 3);
  CHECK(r.best.score == r.trials[0].score);
  CHECK_FALSE(r.best.degenerate);
  CHECK(r.best.hp.max_iters == 40);
}

TEST_CASE("identical scores go to the earlier trial") {
  const auto inst = chimera::testing::random_instance(12, 3, 2, 3, 2);
  SearchSpace s = single_point();
  s.alpha = {0.005, 0.005};
  s.strategy = SearchStrategy::grid;
  s.budget = 2;
  const TuneResult r = tune(inst.network, s, quick_options());
  REQUIRE(r.trials.size() == 2);
  CHECK(r.trials[0].score == r.trials[1].score);
  CHECK(r.best.index == 0);
}

TEST_CASE("trial log length and best score") {
  const auto inst = chimera::testing::random_instance(15, 3, 2, 3, 3);
  SearchSpace s = single_point();
  s.rank = {2, 3};
  s.clusters = {2, 3, 4};
  s.budget = 4;
  s.seed = 7;
  for (Direction d : {Direction::maximize, Direction::minimize}) {
    TuneOptions o = quick_options();
    o.direction = d;
    const TuneResult r = tune(inst.network, s, o);
    CHECK(r.trials.size() == 4);
    for (const auto& t : r.trials) {
      if (t.degenerate) continue;
      if (d == Direction::maximize) CHECK(t.score <= r.best.score);
      if (d == Direction::minimize) CHECK(t.score >= r.best.score);
    }
  }
}

TEST_CASE("grid search visits clusters fastest") {
  const auto inst = chimera::testing::random_instance(15, 3, 2, 3, 4);
  SearchSpace s = single_point();
  s.clusters = {2, 3};
  s.rank = {2, 3};
  s.strategy = SearchStrategy::grid;
  s.budget = 100;
  const TuneResult r = tune(inst.network, s, quick_options());
  REQUIRE(r.trials.size() == 4);
  CHECK(r.trials[0].clusters == 2);
  CHECK(r.trials[1].clusters == 3);
  CHECK(r.trials[0].hp.rank == r.trials[1].hp.rank);
  CHECK(r.trials[0].hp.rank != r.trials[2].hp.rank);
}

TEST_CASE("failed fits are degenerate and all-degenerate searches fail with the log") {
  const auto inst = chimera::testing::random_instance(10, 3, 2, 3, 5);
  SearchSpace s = single_point();
  s.alpha = {1e6};
  s.clusters = {2, 3};
  s.strategy = SearchStrategy::grid;
  s.budget = 2;
  TuneOptions o = quick_options();
  o.base.max_halvings = 0;
  try {
    (void)tune(inst.network, s, o);
    FAIL("expected TuneError");
  } catch (const TuneError& e) {
    REQUIRE(e.trials().size() == 2);
    for (const auto& t : e.trials()) {
      CHECK(t.degenerate);
      CHECK_FALSE(t.error.empty());
    }
  }
}

TEST_CASE("a single-cluster request is degenerate") {
  const auto inst = chimera::testing::random_instance(10, 3, 2, 3, 6);
  SearchSpace s = single_point();
  s.clusters = {1, 2};
  s.strategy = SearchStrategy::grid;
  s.budget = 2;
  const TuneResult r = tune(inst.network, s, quick_options());
  CHECK(r.trials[0].degenerate);
  CHECK(r.best.index == 1);
}

TEST_CASE("invalid spaces") {
  SearchSpace s = single_point();
  s.beta.clear();
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  s = single_point();
  s.budget = 0;
  CHECK_THROWS_AS(validate(s), std::invalid_argument);
  CHECK(direction_from_string("minimize") == Direction::minimize);
  CHECK(search_strategy_from_string("grid") == SearchStrategy::grid);
  CHECK_THROWS_AS(direction_from_string("sideways"), std::invalid_argument);
}
