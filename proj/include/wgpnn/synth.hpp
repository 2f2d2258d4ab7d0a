#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wgpnn/graph_store.hpp"

namespace wgpnn {

/// Periodic temporal KG: at time t every (s, p) links to
///   (s + offset_p + (t mod period) * step_p) mod entities,
/// with step_p coprime to `entities`. Each line is independently replaced by
/// a uniformly random triple with probability `noise`. Tokens are "e<i>" and
/// "p<j>"; a fifth column marks lines "signal" or "noise".
struct SynthSpec {
  std::uint32_t entities = 8;
  std::uint32_t predicates = 2;
  std::uint32_t period = 2;
  /// Number of timestamps.
  std::uint32_t horizon = 200;
  double noise = 0.0;
  std::uint64_t seed = 7;
  Timestamp time_unit = 1;

  void validate() const;
};

class SyntheticGenerator {
 public:
  explicit SyntheticGenerator(const SynthSpec& spec);

  /// Ground-truth object for (subject, predicate) at step index `step`.
  EntityId object_at(EntityId subject, PredicateId predicate, std::uint32_t step) const;

  void write_tsv(std::ostream& out) const;
  const SynthSpec& spec() const noexcept { return spec_; }

 private:
  SynthSpec spec_;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> steps_;
};

}  // namespace wgpnn
