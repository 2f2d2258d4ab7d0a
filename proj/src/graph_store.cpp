#include "wgpnn/graph_store.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "wgpnn/error.hpp"

namespace wgpnn {

const char* category_name(ErrorCategory category) noexcept {
  switch (category) {
    case ErrorCategory::kParse: return "parse";
    case ErrorCategory::kDictionary: return "dictionary";
    case ErrorCategory::kConfig: return "config";
    case ErrorCategory::kNumeric: return "numeric";
    case ErrorCategory::kIo: return "io";
    case ErrorCategory::kCompatibility: return "compatibility";
  }
  return "unknown";
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

template <typename T>
bool parse_integer(std::string_view text, T& value) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc{} && ptr == last;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diagonal + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diagonal = above;
    }
  }
  return row[b.size()];
}

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(ErrorCategory::kIo, "slice store: unexpected end of file");
  return value;
}

constexpr char kSliceMagic[8] = {'W', 'G', 'P', 'S', 'L', 'I', 'C', 'E'};

}  // namespace

std::uint32_t Dictionary::intern(std::string_view token) {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  if (frozen_) {
    throw Error(ErrorCategory::kDictionary, "unknown token '" + std::string(token) + "'");
  }
  const auto id = size();
  tokens_.emplace_back(token);
  ids_.emplace(tokens_.back(), id);
  return id;
}

std::optional<std::uint32_t> Dictionary::find(std::string_view token) const {
  if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
  return std::nullopt;
}

std::vector<std::string> Dictionary::nearest(std::string_view query, std::size_t limit) const {
  std::vector<std::pair<std::size_t, std::uint32_t>> scored;
  scored.reserve(tokens_.size());
  for (std::uint32_t id = 0; id < size(); ++id) scored.emplace_back(edit_distance(query, tokens_[id]), id);
  std::sort(scored.begin(), scored.end());
  std::vector<std::string> result;
  for (std::size_t i = 0; i < std::min(limit, scored.size()); ++i) result.push_back(tokens_[scored[i].second]);
  return result;
}

void Dictionary::write_tsv(std::ostream& out) const {
  for (std::uint32_t id = 0; id < size(); ++id) out << tokens_[id] << '\t' << id << '\n';
}

Dictionary Dictionary::read_tsv(std::istream& in) {
  Dictionary dict;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto view = strip_cr(line);
    if (view.empty()) continue;
    const auto fields = split_tabs(view);
    std::uint32_t id = 0;
    if (fields.size() != 2 || !parse_integer(fields[1], id) || id != dict.size()) {
      throw Error(ErrorCategory::kParse,
                  "dictionary line " + std::to_string(line_number) + ": expected 'token<TAB>" +
                      std::to_string(dict.size()) + "'");
    }
    dict.intern(fields[0]);
  }
  return dict;
}

ParsedQuadruples parse_quadruples(std::istream& source, std::optional<DictionaryPair> dictionaries) {
  ParsedQuadruples result;
  if (dictionaries) {
    result.entities = std::move(dictionaries->entities);
    result.predicates = std::move(dictionaries->predicates);
  }
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(source, line)) {
    ++line_number;
    const auto view = strip_cr(line);
    if (view.empty() || view.front() == '#') continue;
    const auto fields = split_tabs(view);
    const auto where = "line " + std::to_string(line_number);
    if (fields.size() != 4 && fields.size() != 5) {
      throw Error(ErrorCategory::kParse, where + ": expected 4 or 5 tab-separated fields, found " +
                                             std::to_string(fields.size()));
    }
    Timestamp time = 0;
    if (!parse_integer(fields[3], time) || time < 0) {
      throw Error(ErrorCategory::kParse,
                  where + ": timestamp '" + std::string(fields[3]) + "' is not a non-negative integer");
    }
    Quadruple quad;
    try {
      quad.subject = result.entities.intern(fields[0]);
      quad.predicate = result.predicates.intern(fields[1]);
      quad.object = result.entities.intern(fields[2]);
    } catch (const Error& e) {
      throw Error(e.category(), where + ": " + e.what());
    }
    quad.time = time;
    result.quadruples.push_back(quad);
  }
  std::stable_sort(result.quadruples.begin(), result.quadruples.end(),
                   [](const Quadruple& a, const Quadruple& b) { return a.time < b.time; });
  return result;
}

std::vector<Quadruple> add_reciprocals(std::span<const Quadruple> quadruples, PredicateId num_predicates) {
  std::vector<Quadruple> result(quadruples.begin(), quadruples.end());
  result.reserve(2 * quadruples.size());
  for (const auto& q : quadruples) {
    result.push_back({q.object, q.predicate + num_predicates, q.subject, q.time});
  }
  std::stable_sort(result.begin(), result.end(),
                   [](const Quadruple& a, const Quadruple& b) { return a.time < b.time; });
  return result;
}

std::vector<GraphSlice> build_slices(std::span<const Quadruple> quadruples) {
  std::vector<GraphSlice> slices;
  for (const auto& q : quadruples) {
    if (slices.empty() || slices.back().time != q.time) slices.push_back({q.time, {}});
    slices.back().events.push_back({q.subject, q.predicate, q.object});
  }
  return slices;
}

HistoryWindow history_window(std::span<const GraphSlice> slices, EntityId subject, PredicateId predicate,
                             Timestamp query_time, std::size_t window_size) {
  HistoryWindow window{subject, predicate, window_size, {}};
  for (const auto& slice : slices) {
    if (slice.time >= query_time) continue;
    std::vector<EntityId> objects;
    for (const auto& e : slice.events) {
      if (e.subject == subject && e.predicate == predicate) objects.push_back(e.object);
    }
    if (objects.empty()) continue;
    std::sort(objects.begin(), objects.end());
    objects.erase(std::unique(objects.begin(), objects.end()), objects.end());
    window.entries.push_back({slice.time, std::move(objects)});
  }
  std::sort(window.entries.begin(), window.entries.end(),
            [](const HistoryEntry& a, const HistoryEntry& b) { return a.time < b.time; });
  if (window.entries.size() > window_size) {
    window.entries.erase(window.entries.begin(),
                         window.entries.end() - static_cast<std::ptrdiff_t>(window_size));
  }
  return window;
}

GraphStore::GraphStore(std::vector<GraphSlice> slices) : slices_(std::move(slices)) {
  for (std::size_t i = 1; i < slices_.size(); ++i) {
    if (slices_[i].time <= slices_[i - 1].time) {
      throw Error(ErrorCategory::kParse, "graph slices are not strictly increasing in time");
    }
  }
  for (const auto& slice : slices_) {
    for (const auto& e : slice.events) {
      auto& entries = activity_[{e.subject, e.predicate}];
      if (entries.empty() || entries.back().time != slice.time) entries.push_back({slice.time, {}});
      entries.back().objects.push_back(e.object);
    }
  }
  for (auto& [pair, entries] : activity_) {
    for (auto& entry : entries) {
      std::sort(entry.objects.begin(), entry.objects.end());
      entry.objects.erase(std::unique(entry.objects.begin(), entry.objects.end()), entry.objects.end());
    }
  }
}

HistoryWindow GraphStore::history(EntityId subject, PredicateId predicate, Timestamp query_time,
                                  std::size_t window_size) const {
  HistoryWindow window{subject, predicate, window_size, {}};
  const auto it = activity_.find({subject, predicate});
  if (it == activity_.end()) return window;
  const auto& entries = it->second;
  const auto end = std::lower_bound(entries.begin(), entries.end(), query_time,
                                    [](const HistoryEntry& e, Timestamp t) { return e.time < t; });
  const auto available = static_cast<std::size_t>(end - entries.begin());
  const auto begin = end - static_cast<std::ptrdiff_t>(std::min(available, window_size));
  window.entries.assign(begin, end);
  return window;
}

void GraphStore::write_binary(std::ostream& out) const {
  out.write(kSliceMagic, sizeof(kSliceMagic));
  write_pod<std::uint32_t>(out, kFormatVersion);
  write_pod<std::uint64_t>(out, slices_.size());
  for (const auto& slice : slices_) {
    write_pod<std::int64_t>(out, slice.time);
    write_pod<std::uint64_t>(out, slice.events.size());
    for (const auto& e : slice.events) {
      write_pod<std::uint32_t>(out, e.subject);
      write_pod<std::uint32_t>(out, e.predicate);
      write_pod<std::uint32_t>(out, e.object);
    }
  }
}

GraphStore GraphStore::read_binary(std::istream& in) {
  char magic[sizeof(kSliceMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSliceMagic, sizeof(magic)) != 0) {
    throw Error(ErrorCategory::kIo, "slice store: bad magic header");
  }
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kFormatVersion) {
    throw Error(ErrorCategory::kCompatibility,
                "slice store: unsupported version " + std::to_string(version));
  }
  const auto count = read_pod<std::uint64_t>(in);
  std::vector<GraphSlice> slices(count);
  for (auto& slice : slices) {
    slice.time = read_pod<std::int64_t>(in);
    slice.events.resize(read_pod<std::uint64_t>(in));
    for (auto& e : slice.events) {
      e.subject = read_pod<std::uint32_t>(in);
      e.predicate = read_pod<std::uint32_t>(in);
      e.object = read_pod<std::uint32_t>(in);
    }
  }
  return GraphStore(std::move(slices));
}

FilterIndex::FilterIndex(std::span<const std::span<const Quadruple>> splits) {
  for (const auto split : splits) {
    for (const auto& q : split) index_[{q.subject, q.predicate, q.time}].push_back(q.object);
  }
  for (auto& [key, objects] : index_) {
    std::sort(objects.begin(), objects.end());
    objects.erase(std::unique(objects.begin(), objects.end()), objects.end());
  }
}

std::span<const EntityId> FilterIndex::lookup(EntityId subject, PredicateId predicate, Timestamp time) const {
  const auto it = index_.find({subject, predicate, time});
  if (it == index_.end()) return {};
  return it->second;
}

void FilterIndex::write_tsv(std::ostream& out) const {
  for (const auto& [key, objects] : index_) {
    out << key.subject << '\t' << key.predicate << '\t' << key.time << '\t';
    for (std::size_t i = 0; i < objects.size(); ++i) out << (i ? "," : "") << objects[i];
    out << '\n';
  }
}

FilterIndex FilterIndex::read_tsv(std::istream& in) {
  FilterIndex index;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto view = strip_cr(line);
    if (view.empty()) continue;
    const auto fields = split_tabs(view);
    FilterKey key;
    bool ok = fields.size() == 4 && parse_integer(fields[0], key.subject) &&
              parse_integer(fields[1], key.predicate) && parse_integer(fields[2], key.time);
    std::vector<EntityId> objects;
    if (ok) {
      std::string_view rest = fields[3];
      while (ok && !rest.empty()) {
        const auto comma = rest.find(',');
        EntityId object = 0;
        ok = parse_integer(rest.substr(0, comma), object);
        objects.push_back(object);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    }
    if (!ok || objects.empty()) {
      throw Error(ErrorCategory::kParse, "filter index line " + std::to_string(line_number) + " is malformed");
    }
    index.index_[key] = std::move(objects);
  }
  return index;
}

FilterIndex build_filter_index(std::span<const Quadruple> train, std::span<const Quadruple> valid,
                               std::span<const Quadruple> test) {
  const std::span<const Quadruple> splits[] = {train, valid, test};
  return FilterIndex(splits);
}

Timestamp base_time_unit(std::span<const Quadruple> quadruples) {
  std::vector<Timestamp> times;
  times.reserve(quadruples.size());
  for (const auto& q : quadruples) times.push_back(q.time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  Timestamp unit = 0;
  for (std::size_t i = 1; i < times.size(); ++i) unit = std::gcd(unit, times[i] - times[i - 1]);
  return unit > 0 ? unit : 1;
}

}  // namespace wgpnn
