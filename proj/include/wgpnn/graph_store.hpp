#pragma once

// Temporal knowledge graph storage: quadruple ingestion, token dictionaries,
// per-timestamp graph slices, Markov-window histories and the time-aware
// filter index used at evaluation time.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace wgpnn {

using EntityId = std::uint32_t;
using PredicateId = std::uint32_t;
using Timestamp = std::int64_t;

struct Quadruple {
  EntityId subject = 0;
  PredicateId predicate = 0;
  EntityId object = 0;
  Timestamp time = 0;

  friend bool operator==(const Quadruple&, const Quadruple&) = default;
  friend auto operator<=>(const Quadruple&, const Quadruple&) = default;
};

struct Triple {
  EntityId subject = 0;
  PredicateId predicate = 0;
  EntityId object = 0;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Bidirectional token <-> dense id map. Ids are assigned in first-seen
/// order. A frozen dictionary rejects unseen tokens.
class Dictionary {
 public:
  std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(tokens_.size()); }
  bool frozen() const noexcept { return frozen_; }
  void freeze() noexcept { frozen_ = true; }

  /// Returns the id of `token`, inserting it unless frozen.
  std::uint32_t intern(std::string_view token);
  std::optional<std::uint32_t> find(std::string_view token) const;
  const std::string& token(std::uint32_t id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  /// Up to `limit` tokens closest to `query` by edit distance.
  std::vector<std::string> nearest(std::string_view query, std::size_t limit = 3) const;

  /// "token\tid" lines, in id order.
  void write_tsv(std::ostream& out) const;
  static Dictionary read_tsv(std::istream& in);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  bool frozen_ = false;
};

struct ParsedQuadruples {
  std::vector<Quadruple> quadruples;
  Dictionary entities;
  Dictionary predicates;
};

struct DictionaryPair {
  Dictionary entities;
  Dictionary predicates;
};

/// Parses tab-separated "subject predicate object timestamp [ignored]" lines.
/// Blank lines and lines starting with '#' are skipped. When `dictionaries`
/// is supplied, its ids are reused (and extended unless frozen). The result
/// is stably sorted by timestamp.
ParsedQuadruples parse_quadruples(std::istream& source,
                                  std::optional<DictionaryPair> dictionaries = std::nullopt);

/// Appends (o, p + num_predicates, s, t) for every quadruple and re-sorts
/// stably by time. Originals keep their relative order ahead of inverses
/// sharing a timestamp.
std::vector<Quadruple> add_reciprocals(std::span<const Quadruple> quadruples,
                                       PredicateId num_predicates);

struct GraphSlice {
  Timestamp time = 0;
  std::vector<Triple> events;
};

/// Groups time-sorted quadruples into one slice per distinct timestamp.
std::vector<GraphSlice> build_slices(std::span<const Quadruple> quadruples);

struct HistoryEntry {
  Timestamp time = 0;
  /// Sorted, duplicate-free, never empty.
  std::vector<EntityId> objects;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

struct HistoryWindow {
  EntityId subject = 0;
  PredicateId predicate = 0;
  std::size_t window_size = 0;
  /// Oldest first.
  std::vector<HistoryEntry> entries;
};

/// Scans `slices` for the `window_size` most recent slices strictly before
/// `query_time` in which (subject, predicate) links to at least one object.
HistoryWindow history_window(std::span<const GraphSlice> slices, EntityId subject,
                             PredicateId predicate, Timestamp query_time,
                             std::size_t window_size);

/// Immutable slice store with a per-(subject, predicate) activity index, so
/// window lookups cost O(log T + M). Safe for concurrent readers.
class GraphStore {
 public:
  GraphStore() = default;
  explicit GraphStore(std::vector<GraphSlice> slices);

  const std::vector<GraphSlice>& slices() const noexcept { return slices_; }

  HistoryWindow history(EntityId subject, PredicateId predicate, Timestamp query_time,
                        std::size_t window_size) const;

  /// Binary layout (little-endian): magic "WGPSLICE", u32 version, u64 slice
  /// count, then per slice i64 time, u64 event count and u32 triples.
  void write_binary(std::ostream& out) const;
  static GraphStore read_binary(std::istream& in);

  static constexpr std::uint32_t kFormatVersion = 1;

 private:
  std::vector<GraphSlice> slices_;
  std::map<std::pair<EntityId, PredicateId>, std::vector<HistoryEntry>> activity_;
};

struct FilterKey {
  EntityId subject = 0;
  PredicateId predicate = 0;
  Timestamp time = 0;

  friend bool operator==(const FilterKey&, const FilterKey&) = default;
  friend auto operator<=>(const FilterKey&, const FilterKey&) = default;
};

/// (subject, predicate, time) -> every object observed with that key in any
/// split.
class FilterIndex {
 public:
  FilterIndex() = default;
  explicit FilterIndex(std::span<const std::span<const Quadruple>> splits);

  /// Sorted objects for the key; empty when absent.
  std::span<const EntityId> lookup(EntityId subject, PredicateId predicate, Timestamp time) const;
  std::size_t size() const noexcept { return index_.size(); }

  /// One line per key: "s\tp\tt\to1,o2,..." in key order.
  void write_tsv(std::ostream& out) const;
  static FilterIndex read_tsv(std::istream& in);

 private:
  std::map<FilterKey, std::vector<EntityId>> index_;
};

FilterIndex build_filter_index(std::span<const Quadruple> train, std::span<const Quadruple> valid,
                               std::span<const Quadruple> test);

/// Largest unit dividing every gap between distinct timestamps (1 when fewer
/// than two distinct timestamps exist).
Timestamp base_time_unit(std::span<const Quadruple> quadruples);

}  // namespace wgpnn
