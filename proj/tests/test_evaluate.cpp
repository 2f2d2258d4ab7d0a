#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "wgpnn/evaluate.hpp"

using namespace wgpnn;
using namespace wgpnn::testing;

TEST_CASE("metric formulas") {
  const std::vector<double> ranks = {1.0, 2.0, 4.0};
  const auto m = compute_metrics(ranks);
  CHECK(m.count == 3);
  CHECK(std::abs(m.mrr - (1.0 + 0.5 + 0.25) / 3.0) <= 1e-12);
  CHECK(m.mrr == doctest::Approx(0.583333).epsilon(1e-6));
  CHECK(std::abs(m.hits_at_3 - 2.0 / 3.0) <= 1e-9);
  CHECK(m.hits_at_10 == 1.0);
  CHECK(compute_metrics({}).count == 0);
}

TEST_CASE("rank_of tie policies") {
  const std::vector<double> scores = {0.5, 0.9, 0.5, 0.5, 0.1};
  CHECK(rank_of(scores, 0, {}) == 3.0);  // one above, two ties
  CHECK(rank_of(scores, 0, {}, TiePolicy::kPessimistic) == 4.0);
  CHECK(rank_of(scores, 1, {}) == 1.0);
  const std::vector<EntityId> excluded = {1, 2};
  CHECK(rank_of(scores, 0, excluded) == 1.5);
}

TEST_CASE("filtering removes exactly the concurrent true objects") {
  // Candidate 1 beats the target but is itself a true answer at (s, p, t).
  const std::vector<double> scores = {0.2, 0.9, 0.8, 0.1};
  const std::vector<EntityId> other_truths = {1};
  CHECK(rank_of(scores, 2, {}) == 2.0);
  CHECK(rank_of(scores, 2, other_truths) == 1.0);
}

TEST_CASE("filtered ranks equal the brute-force oracle on concurrent facts") {
  const auto data = concurrent_dataset();
  REQUIRE(data.raw.train.size() + data.raw.valid.size() + data.raw.test.size() == 30);
  ModelShape shape{data.meta.num_entities, data.num_predicates(), 4, 4, 2};
  ForwardConfig forward;
  forward.time_unit = data.meta.time_unit;
  forward.regularizer.tau_max = data.meta.tau_max;
  EvaluateOptions options;
  options.num_raw_predicates = data.meta.num_raw_predicates;
  std::size_t strictly_better = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto params = ModelParams::initialized(shape, seed);
    for (const auto* split : {&data.events.train, &data.events.valid, &data.events.test}) {
      const auto report = evaluate(params, data.store, *split, data.filter, forward, options);
      REQUIRE(report.queries.size() == split->size());
      for (const auto& r : report.queries) {
        const auto p = predict(params, data.store, {r.query.subject, r.query.predicate, r.query.time}, forward);
        CHECK(r.filtered_rank == brute_force_filtered_rank(p.scores.mean, r.query, data));
        CHECK(r.filtered_rank <= r.raw_rank);
        strictly_better += r.filtered_rank < r.raw_rank ? 1 : 0;
      }
      CHECK(report.object_side.raw.count + report.subject_side.raw.count == report.combined.raw.count);
    }
  }
  CHECK(strictly_better > 0);
}

TEST_CASE("evaluation is pure and thread-count independent") {
  const auto data = synthetic_dataset({.horizon = 30});
  ModelShape shape{data.meta.num_entities, data.num_predicates(), 8, 8, 2};
  const auto params = ModelParams::initialized(shape, 4);
  ForwardConfig forward;
  forward.time_unit = data.meta.time_unit;
  forward.regularizer.tau_max = data.meta.tau_max;
  EvaluateOptions one;
  one.num_raw_predicates = data.meta.num_raw_predicates;
  auto four = one;
  four.threads = 4;
  const auto a = evaluate(params, data.store, data.events.test, data.filter, forward, one);
  const auto b = evaluate(params, data.store, data.events.test, data.filter, forward, four);
  std::ostringstream ta, tb;
  write_ranks_tsv(ta, a);
  write_ranks_tsv(tb, b);
  CHECK(ta.str() == tb.str());
  CHECK(metrics_json(a).dump() == metrics_json(b).dump());
  CHECK(metrics_json(a).dump() ==
        metrics_json(evaluate(params, data.store, data.events.test, data.filter, forward, one)).dump());
}

TEST_CASE("metrics table layout") {
  RankReport report;
  report.queries.push_back({{0, 0, 1, 5}, 2.0, 1.0});
  std::vector<double> raw = {2.0}, filtered = {1.0};
  report.combined = {compute_metrics(raw), compute_metrics(filtered)};
  report.object_side = report.combined;
  std::ostringstream out;
  write_metrics_tsv(out, report);
  const auto text = out.str();
  CHECK(text.rfind("protocol\tside\tcount\tmrr\thits_at_3\thits_at_10\n", 0) == 0);
  CHECK(text.find("raw\tcombined\t1\t0.5\t1\t1\n") != std::string::npos);
  CHECK(text.find("time_aware\tcombined\t1\t1\t1\t1\n") != std::string::npos);
  CHECK(text.find("raw\tsubject\t0\t0\t0\t0\n") != std::string::npos);
}
