#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "wgpnn/graph_store.hpp"
#include "wgpnn/model.hpp"

namespace wgpnn {

enum class TiePolicy {
  /// Ties with the true object count as half above it.
  kMean,
  /// The true object loses every tie.
  kPessimistic,
};

/// 1 + #(candidates scoring above the target) + tie share, skipping the
/// target itself and every id in `excluded`.
double rank_of(std::span<const double> scores, EntityId target, std::span<const EntityId> excluded,
               TiePolicy ties = TiePolicy::kMean);

struct RankMetrics {
  std::size_t count = 0;
  double mrr = 0.0;
  double hits_at_3 = 0.0;
  double hits_at_10 = 0.0;
};

RankMetrics compute_metrics(std::span<const double> ranks);

struct QueryRank {
  Quadruple query;
  double raw_rank = 0.0;
  double filtered_rank = 0.0;
};

struct ProtocolMetrics {
  RankMetrics raw;
  RankMetrics filtered;
};

struct RankReport {
  std::vector<QueryRank> queries;
  /// Every query.
  ProtocolMetrics combined;
  /// Queries on original predicates, (s, p, ?, t).
  ProtocolMetrics object_side;
  /// Queries on reciprocal predicates, i.e. (?, p, o, t).
  ProtocolMetrics subject_side;
};

struct EvaluateOptions {
  TiePolicy ties = TiePolicy::kMean;
  /// Predicates at or above this id are reciprocal.
  PredicateId num_raw_predicates = 0;
  /// Worker threads; results do not depend on it.
  std::size_t threads = 1;
};

/// Ranks the true object of every query among all candidates, with history
/// drawn only from slices strictly before the query time.
RankReport evaluate(const ModelParams& params, const GraphStore& store, std::span<const Quadruple> queries,
                    const FilterIndex& filter, const ForwardConfig& forward, const EvaluateOptions& options);

/// Which protocols a written report includes.
struct ReportProtocols {
  bool raw = true;
  bool time_aware = true;
};

/// Per-query ranks as TSV with a header row.
void write_ranks_tsv(std::ostream& out, const RankReport& report, ReportProtocols protocols = {});
/// protocol/side/metric table as TSV with a header row.
void write_metrics_tsv(std::ostream& out, const RankReport& report, ReportProtocols protocols = {});
nlohmann::json metrics_json(const RankReport& report, ReportProtocols protocols = {});

}  // namespace wgpnn
