#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "attrspace/intersect.hpp"
#include "attrspace/synth.hpp"

using namespace attrspace;

namespace {

// two-aspect space from explicit 1-d or 2-d coordinates
AttributeSpace two_target_space(const std::vector<std::vector<double>>& a,
                                const std::vector<std::vector<double>>& b) {
  AttributeSchema schema;
  schema.aspects = {"sentiment", "topic"};
  schema.attributes = {{"positive"}, {"world"}};
  std::vector<RawPoint> recs;
  int n = 0;
  for (const auto& v : a) {
    RawPoint p;
    p.id = "a" + std::to_string(n++);
    p.aspect = "sentiment";
    p.attribute = "positive";
    p.vec = v;
    recs.push_back(std::move(p));
  }
  for (const auto& v : b) {
    RawPoint p;
    p.id = "b" + std::to_string(n++);
    p.aspect = "topic";
    p.attribute = "world";
    p.vec = v;
    recs.push_back(std::move(p));
  }
  return AttributeSpace::build(std::move(schema), std::move(recs));
}

AttributeQuery both(double w1 = 1.0, double w2 = 1.0) {
  AttributeQuery q;
  q.targets = {{"sentiment", "positive"}, {"topic", "world"}};
  q.weights = {w1, w2};
  return q;
}

}  // namespace

TEST_CASE("resolve_query: normalization and rejection") {
  auto space = two_target_space({{0.0}}, {{1.0}});

  auto rq = resolve_query(space, both(2.0, 6.0));
  CHECK(rq.weights[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rq.weights[1] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(rq.weight_sum == doctest::Approx(1.0).epsilon(1e-15));

  AttributeQuery q;
  CHECK_THROWS_AS(resolve_query(space, q), ValidationError);  // no targets

  q = both();
  q.weights = {1.0};
  CHECK_THROWS_AS(resolve_query(space, q), ValidationError);  // count mismatch

  q = both(1.0, -1.0);
  CHECK_THROWS_AS(resolve_query(space, q), ValidationError);  // sum not positive

  q = both();
  q.targets[1].aspect = "texture";
  CHECK_THROWS_AS(resolve_query(space, q), ValidationError);  // unknown aspect

  q = both();
  q.targets[1].attribute = "sports";
  CHECK_THROWS_AS(resolve_query(space, q), ValidationError);  // unknown attribute

  q = both();
  q.targets[1] = {"sentiment", "positive"};
  CHECK_THROWS_AS(resolve_query(space, q), ValidationError);  // aspect used twice

  // negative weights are fine while the sum stays positive
  CHECK_NOTHROW(resolve_query(space, both(2.0, -0.5)));
}

TEST_CASE("resolve_query: rejects empty target subsets") {
  AttributeSchema schema;
  schema.aspects = {"sentiment"};
  schema.attributes = {{"positive", "negative"}};
  RawPoint p;
  p.id = "x";
  p.aspect = "sentiment";
  p.attribute = "positive";
  p.vec = {0.0};
  auto space = AttributeSpace::build(std::move(schema), {p});
  AttributeQuery q;
  q.targets = {{"sentiment", "negative"}};  // declared but unpopulated
  q.weights = {1.0};
  CHECK_THROWS_AS(resolve_query(space, q), ValidationError);
}

TEST_CASE("step: full-K equals the interpolation baseline from any start") {
  auto space = two_target_space({{0.0, 1.0}, {2.0, 3.0}, {4.0, -1.0}},
                                {{10.0, 0.5}, {12.0, 1.5}});
  const auto base = interpolation_baseline(space, both());
  for (const auto& start : {std::vector<double>{0, 0}, {100, -50}, {3.7, 0.01}}) {
    const auto s = step(space, both(), start, 1000);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == base[0]);  // bitwise: same summation chain by construction
    CHECK(s[1] == base[1]);
  }
}

TEST_CASE("step: K=1 averages the nearest point of each target") {
  auto space = two_target_space({{0.0}, {8.0}}, {{3.0}, {20.0}});
  const std::vector<double> cand = {2.0};
  const auto s = step(space, both(), cand, 1);
  // nearest positive: 0.0, nearest world: 3.0, equal weights
  CHECK(s[0] == doctest::Approx(1.5).epsilon(1e-15));

  // weighting shifts the average
  const auto sw = step(space, both(3.0, 1.0), cand, 1);
  CHECK(sw[0] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("quality: max over targets of the k_eval neighbor mean") {
  auto space = two_target_space({{0.0}, {2.0}}, {{1.0}});
  const std::vector<double> at0 = {0.0};
  // sentiment: mean(0, 2) = 1; topic: 1 -> max 1
  CHECK(quality(space, both(), at0, 2) == doctest::Approx(1.0).epsilon(1e-15));
  // k_eval=1: sentiment 0, topic 1 -> max 1
  CHECK(quality(space, both(), at0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> at1 = {1.0};
  CHECK(quality(space, both(), at1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(quality(space, both(), at0, 0), ValidationError);
}

TEST_CASE("init_candidates: coincident points score best") {
  // positive: {0, 10}; world: {0.1, 20}. Mean 1-NN distances:
  // 0 -> .05, 0.1 -> .05, 10 -> 4.95, 20 -> 5.0
  auto space = two_target_space({{0.0}, {10.0}}, {{0.1}, {20.0}});
  SearchConfig cfg;
  cfg.M = 2;
  cfg.pool_factor = 10;
  cfg.seed = 4;
  bool truncated = true;
  std::vector<std::uint32_t> chosen;
  const auto cands = init_candidates(space, both(), cfg, &truncated, &chosen);
  REQUIRE(cands.size() == 2);
  CHECK(!truncated);
  std::vector<std::uint32_t> sorted = chosen;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::uint32_t>{0, 2});  // the 0.0 / 0.1 pair
}

TEST_CASE("init_candidates: truncation below M, determinism across calls") {
  auto space = two_target_space({{0.0}, {1.0}}, {{2.0}});
  SearchConfig cfg;
  cfg.M = 100;
  cfg.seed = 9;
  bool truncated = false;
  const auto a = init_candidates(space, both(), cfg, &truncated);
  CHECK(truncated);
  CHECK(a.size() == 3);

  const auto b = init_candidates(space, both(), cfg);
  CHECK(a == b);
}

TEST_CASE("search config validation") {
  auto space = two_target_space({{0.0}}, {{1.0}});
  SearchConfig cfg;
  cfg.K = 0;
  CHECK_THROWS_AS(search(space, both(), cfg), ValidationError);
  cfg = {};
  cfg.M = 0;
  CHECK_THROWS_AS(search(space, both(), cfg), ValidationError);
  cfg = {};
  cfg.pool_factor = 0;
  CHECK_THROWS_AS(search(space, both(), cfg), ValidationError);
  cfg = {};
  cfg.top_c = 0;
  CHECK_THROWS_AS(search(space, both(), cfg), ValidationError);
}

TEST_CASE("search: full-K degenerates to the baseline after one step") {
  const auto space = build_scenario(preset_scenario("symmetric-overlap", 3));
  SearchConfig cfg;
  cfg.K = 1000;  // covers both targets entirely
  cfg.M = 8;
  cfg.seed = 3;
  const auto res = search(space, both(), cfg);
  const auto base = interpolation_baseline(space, both());
  REQUIRE(res.point.size() == 2);
  CHECK(res.point[0] == base[0]);
  CHECK(res.point[1] == base[1]);
  CHECK(res.converged[res.selected_candidate]);
  CHECK(res.converged_after[res.selected_candidate] == 1);
}

TEST_CASE("search: symmetric overlap lands near the origin") {
  const auto space = build_scenario(preset_scenario("symmetric-overlap", 0));
  SearchConfig cfg;
  cfg.K = 50;
  cfg.M = 64;
  cfg.seed = 0;
  const auto res = search(space, both(), cfg);
  REQUIRE(res.point.size() == 2);
  CHECK(std::fabs(res.point[0]) < 0.6);
  CHECK(std::fabs(res.point[1]) < 0.6);
  CHECK(res.iterations_run >= 1);
  CHECK(res.iterations_run <= cfg.S);

  // shortlist: top_c candidates, scores ascending, selection is rank 0
  REQUIRE(res.shortlist.size() == cfg.top_c);
  for (std::size_t i = 1; i < res.shortlist.size(); ++i)
    CHECK(res.final_scores[res.shortlist[i - 1]] <= res.final_scores[res.shortlist[i]]);
  CHECK(res.selected_candidate == res.shortlist[0]);

  // searched point scores at least as well as the straight interpolation
  const auto base = interpolation_baseline(space, both());
  CHECK(quality(space, both(), res.point, cfg.K) <=
        quality(space, both(), base, cfg.K) + 1e-12);

  // trajectories start at the init candidates and end at the final points
  REQUIRE(res.trajectories.size() == 64);
  const auto cands = init_candidates(space, both(), cfg);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    REQUIRE(!res.trajectories[i].empty());
    CHECK(res.trajectories[i].front() == cands[i]);
  }
  CHECK(res.trajectories[res.selected_candidate].back() == res.point);

  SearchConfig quiet = cfg;
  quiet.record_trajectories = false;
  CHECK(search(space, both(), quiet).trajectories.empty());
}

TEST_CASE("search: weight rescaling changes nothing") {
  const auto space = build_scenario(preset_scenario("symmetric-overlap", 1));
  SearchConfig cfg;
  cfg.K = 40;
  cfg.M = 32;
  cfg.seed = 7;
  const auto a = search(space, both(1.0, 2.0), cfg);
  const auto b = search(space, both(10.0, 20.0), cfg);
  CHECK(a.point == b.point);  // bitwise
  CHECK(a.selected_candidate == b.selected_candidate);
  CHECK(a.final_scores == b.final_scores);
}

TEST_CASE("search: stochastic selection picks from the shortlist, seeded") {
  const auto space = build_scenario(preset_scenario("symmetric-overlap", 2));
  SearchConfig cfg;
  cfg.K = 40;
  cfg.M = 48;
  cfg.selection = SearchConfig::Selection::stochastic;
  cfg.seed = 21;
  const auto a = search(space, both(), cfg);
  const auto b = search(space, both(), cfg);
  CHECK(a.selected_candidate == b.selected_candidate);
  CHECK(a.point == b.point);
  CHECK(std::find(a.shortlist.begin(), a.shortlist.end(),
                  static_cast<std::uint32_t>(a.selected_candidate)) != a.shortlist.end());
}

TEST_CASE("grid_oracle: exact hits, ties, and bounds") {
  SUBCASE("resolution 1 returns the lower corner") {
    auto space = two_target_space({{0.0}}, {{1.0}});
    GridBounds b{{-3.0}, {5.0}};
    const auto g = grid_oracle(space, both(), b, 1, 1);
    CHECK(g == std::vector<double>{-3.0});
  }
  SUBCASE("equal-quality tie goes to the lexicographically first cell") {
    auto space = two_target_space({{0.25}}, {{0.25}});
    GridBounds b{{0.0}, {1.0}};  // grid {0, 0.5}: both at distance 0.25
    const auto g = grid_oracle(space, both(), b, 2, 1);
    CHECK(g == std::vector<double>{0.0});
  }
  SUBCASE("2-d grid lands on the zero-quality cell") {
    auto space = two_target_space({{0.3, 0.7}}, {{0.3, 0.7}});
    GridBounds b{{0.0, 0.0}, {1.0, 1.0}};
    const auto g = grid_oracle(space, both(), b, 10, 1);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(0.7).epsilon(1e-15));
  }
  SUBCASE("validation") {
    auto space = two_target_space({{0.0}}, {{1.0}});
    GridBounds b{{0.0}, {1.0}};
    CHECK_THROWS_AS(grid_oracle(space, both(), b, 0, 1), ValidationError);
    CHECK_THROWS_AS(grid_oracle(space, both(), GridBounds{{1.0}, {0.0}}, 4, 1),
                    ValidationError);
    CHECK_THROWS_AS(grid_oracle(space, both(), GridBounds{{0.0, 0.0}, {1.0, 1.0}}, 4, 1),
                    ValidationError);  // bounds dim != space dim
    const auto wide = build_scenario(preset_scenario("three-aspect", 0));
    AttributeQuery q;
    q.targets = {{"sentiment", "positive"}};
    q.weights = {1.0};
    GridBounds b8{std::vector<double>(8, 0.0), std::vector<double>(8, 1.0)};
    CHECK_THROWS_AS(grid_oracle(wide, q, b8, 4, 1), ValidationError);
  }
}

TEST_CASE("grid_oracle beats the midpoint on skewed tails") {
  const auto space = build_scenario(preset_scenario("skewed-tails", 0));
  AttributeQuery q = both();
  GridBounds b{{-8.0, -4.0}, {8.0, 12.0}};
  const auto g = grid_oracle(space, q, b, 64, 10);
  const auto base = interpolation_baseline(space, q);
  CHECK(quality(space, q, g, 10) < quality(space, q, base, 10));
  CHECK(g[1] > 1.0);  // the crossing sits well above the axis
}
