#pragma once

// A prepared dataset: dictionaries, time-ordered splits, the slice store
// (with reciprocal predicates), the filter index and derived statistics, plus
// its on-disk layout:
//
//   entities.tsv, predicates.tsv   token<TAB>id
//   train.tsv, valid.tsv, test.tsv subject<TAB>predicate<TAB>object<TAB>time (ids, original direction)
//   slices.bin                     GraphStore binary format
//   filter.tsv                     FilterIndex over all splits, reciprocals included
//   meta.json                      sizes, time unit, tau_max, artifact checksums

#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "wgpnn/graph_store.hpp"
#include "wgpnn/train.hpp"

namespace wgpnn {

struct DatasetMeta {
  std::uint32_t num_entities = 0;
  std::uint32_t num_raw_predicates = 0;
  Timestamp time_unit = 1;
  /// 99th percentile of training query offsets.
  double tau_max = 0.0;
  std::size_t num_slices = 0;
};

struct Dataset {
  Dictionary entities;
  /// Original predicates only; id p + num_raw_predicates is the inverse of p.
  Dictionary predicates;
  DatasetMeta meta;
  /// Id quadruples as ingested.
  Splits raw;
  /// raw plus reciprocal events, time-sorted.
  Splits events;
  GraphStore store;
  FilterIndex filter;

  std::uint32_t num_predicates() const noexcept { return 2 * meta.num_raw_predicates; }
};

/// Nearest-rank percentile of the query offsets of `events` whose history
/// window is non-empty; log(2) when none qualifies.
double offset_percentile(const GraphStore& store, std::span<const Quadruple> events, Timestamp time_unit,
                         double percentile = 0.99);

/// Derives reciprocals, slices, the filter index, the time unit and tau_max.
Dataset build_dataset(Dictionary entities, Dictionary predicates, Splits raw);

/// One input file is split 80/10/10 by time; three are taken as
/// train/valid/test and must not overlap in time.
Dataset prepare_from_files(std::span<const std::filesystem::path> inputs);

/// File names that make up a prepared dataset directory.
inline constexpr const char* kPreparedFiles[] = {"entities.tsv", "predicates.tsv", "train.tsv", "valid.tsv",
                                                  "test.tsv",     "slices.bin",     "filter.tsv", "meta.json"};

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

/// Writes all artifacts; returns file name -> checksum.
std::map<std::string, std::string> write_prepared(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_prepared(const std::filesystem::path& dir);

}  // namespace wgpnn
