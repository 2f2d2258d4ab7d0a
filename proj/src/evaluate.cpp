#include "wgpnn/evaluate.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <thread>

#include "wgpnn/error.hpp"

namespace wgpnn {

double rank_of(std::span<const double> scores, EntityId target, std::span<const EntityId> excluded,
               TiePolicy ties) {
  if (target >= scores.size()) throw Error(ErrorCategory::kDictionary, "rank_of: target outside candidate set");
  const double reference = scores[target];
  std::size_t higher = 0;
  std::size_t tied = 0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    if (c == target) continue;
    if (std::binary_search(excluded.begin(), excluded.end(), static_cast<EntityId>(c))) continue;
    if (scores[c] > reference) {
      ++higher;
    } else if (scores[c] == reference) {
      ++tied;
    }
  }
  const double tie_share = ties == TiePolicy::kMean ? 0.5 * static_cast<double>(tied) : static_cast<double>(tied);
  return 1.0 + static_cast<double>(higher) + tie_share;
}

RankMetrics compute_metrics(std::span<const double> ranks) {
  RankMetrics m;
  m.count = ranks.size();
  if (ranks.empty()) return m;
  for (const double r : ranks) {
    m.mrr += 1.0 / r;
    m.hits_at_3 += r <= 3.0 ? 1.0 : 0.0;
    m.hits_at_10 += r <= 10.0 ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(ranks.size());
  m.mrr /= n;
  m.hits_at_3 /= n;
  m.hits_at_10 /= n;
  return m;
}

namespace {

ProtocolMetrics metrics_for(std::span<const QueryRank> ranks, const auto& keep) {
  std::vector<double> raw, filtered;
  for (const auto& r : ranks) {
    if (!keep(r.query)) continue;
    raw.push_back(r.raw_rank);
    filtered.push_back(r.filtered_rank);
  }
  return {compute_metrics(raw), compute_metrics(filtered)};
}

QueryRank rank_query(const ModelParams& params, const GraphStore& store, const Quadruple& q,
                     const FilterIndex& filter, const ForwardConfig& forward, TiePolicy ties) {
  if (q.subject >= params.shape.num_entities || q.object >= params.shape.num_entities ||
      q.predicate >= params.shape.num_predicates) {
    throw Error(ErrorCategory::kDictionary, "evaluate: query (" + std::to_string(q.subject) + ", " +
                                                std::to_string(q.predicate) + ", " + std::to_string(q.object) +
                                                ") lies outside the model's dictionaries");
  }
  const auto prediction = predict(params, store, {q.subject, q.predicate, q.time}, forward);
  const auto& scores = prediction.scores.mean;
  QueryRank rank{q, rank_of(scores, q.object, {}, ties), 0.0};
  rank.filtered_rank = rank_of(scores, q.object, filter.lookup(q.subject, q.predicate, q.time), ties);
  return rank;
}

void write_metrics_row(std::ostream& out, const char* protocol, const char* side, const RankMetrics& m) {
  out << protocol << '\t' << side << '\t' << m.count << '\t' << m.mrr << '\t' << m.hits_at_3 << '\t'
      << m.hits_at_10 << '\n';
}

nlohmann::json to_json(const RankMetrics& m) {
  return {{"count", m.count}, {"mrr", m.mrr}, {"hits_at_3", m.hits_at_3}, {"hits_at_10", m.hits_at_10}};
}

nlohmann::json to_json(const ProtocolMetrics& m, ReportProtocols protocols) {
  nlohmann::json out = nlohmann::json::object();
  if (protocols.raw) out["raw"] = to_json(m.raw);
  if (protocols.time_aware) out["time_aware"] = to_json(m.filtered);
  return out;
}

}  // namespace

RankReport evaluate(const ModelParams& params, const GraphStore& store, std::span<const Quadruple> queries,
                    const FilterIndex& filter, const ForwardConfig& forward, const EvaluateOptions& options) {
  RankReport report;
  report.queries.resize(queries.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.threads, queries.size()));
  const auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      report.queries[i] = rank_query(params, store, queries[i], filter, forward, options.ties);
    }
  };
  if (workers == 1) {
    run(0, queries.size());
  } else {
    std::vector<std::exception_ptr> failures(workers);
    {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (queries.size() + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            run(w * chunk, std::min(queries.size(), (w + 1) * chunk));
          } catch (...) {
            failures[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  const auto raw_predicates = options.num_raw_predicates;
  report.combined = metrics_for(report.queries, [](const Quadruple&) { return true; });
  report.object_side =
      metrics_for(report.queries, [&](const Quadruple& q) { return raw_predicates == 0 || q.predicate < raw_predicates; });
  report.subject_side =
      metrics_for(report.queries, [&](const Quadruple& q) { return raw_predicates > 0 && q.predicate >= raw_predicates; });
  return report;
}

void write_ranks_tsv(std::ostream& out, const RankReport& report, ReportProtocols protocols) {
  out << "subject\tpredicate\tobject\ttime";
  if (protocols.raw) out << "\traw_rank";
  if (protocols.time_aware) out << "\tfiltered_rank";
  out << '\n';
  for (const auto& r : report.queries) {
    out << r.query.subject << '\t' << r.query.predicate << '\t' << r.query.object << '\t' << r.query.time;
    if (protocols.raw) out << '\t' << r.raw_rank;
    if (protocols.time_aware) out << '\t' << r.filtered_rank;
    out << '\n';
  }
}

void write_metrics_tsv(std::ostream& out, const RankReport& report, ReportProtocols protocols) {
  const auto old_precision = out.precision(10);
  out << "protocol\tside\tcount\tmrr\thits_at_3\thits_at_10\n";
  const std::pair<const char*, const ProtocolMetrics*> sides[] = {
      {"combined", &report.combined}, {"object", &report.object_side}, {"subject", &report.subject_side}};
  for (const auto& [name, m] : sides) {
    if (protocols.raw) write_metrics_row(out, "raw", name, m->raw);
    if (protocols.time_aware) write_metrics_row(out, "time_aware", name, m->filtered);
  }
  out.precision(old_precision);
}

nlohmann::json metrics_json(const RankReport& report, ReportProtocols protocols) {
  nlohmann::json ranks = nlohmann::json::array();
  nlohmann::json columns = {"subject", "predicate", "object", "time"};
  if (protocols.raw) columns.push_back("raw_rank");
  if (protocols.time_aware) columns.push_back("filtered_rank");
  for (const auto& r : report.queries) {
    nlohmann::json row = {r.query.subject, r.query.predicate, r.query.object, r.query.time};
    if (protocols.raw) row.push_back(r.raw_rank);
    if (protocols.time_aware) row.push_back(r.filtered_rank);
    ranks.push_back(std::move(row));
  }
  return {{"combined", to_json(report.combined, protocols)},
          {"object_side", to_json(report.object_side, protocols)},
          {"subject_side", to_json(report.subject_side, protocols)},
          {"rank_columns", std::move(columns)},
          {"ranks", std::move(ranks)}};
}

}  // namespace wgpnn
