#include "wgpnn/prepared.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "wgpnn/error.hpp"
#include "wgpnn/model.hpp"

namespace wgpnn {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write " + path.string());
  return out;
}

void write_quadruples(const std::filesystem::path& path, std::span<const Quadruple> quads) {
  auto out = open_output(path);
  for (const auto& q : quads) out << q.subject << '\t' << q.predicate << '\t' << q.object << '\t' << q.time << '\n';
}

std::vector<Quadruple> read_quadruples(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<Quadruple> out;
  Quadruple q;
  while (in >> q.subject >> q.predicate >> q.object >> q.time) out.push_back(q);
  if (!in.eof()) throw Error(ErrorCategory::kParse, path.string() + ": malformed id quadruple");
  return out;
}

void check_split_order(const Splits& s) {
  const auto max_time = [](const std::vector<Quadruple>& v) { return v.empty() ? Timestamp{-1} : v.back().time; };
  const auto min_time = [](const std::vector<Quadruple>& v) {
    return v.empty() ? std::numeric_limits<Timestamp>::max() : v.front().time;
  };
  if (!(max_time(s.train) < min_time(s.valid) && max_time(s.valid) < min_time(s.test) &&
        max_time(s.train) < min_time(s.test))) {
    throw Error(ErrorCategory::kParse, "overlapping split timestamps: need max(train) < min(valid) < min(test)");
  }
}

}  // namespace

double offset_percentile(const GraphStore& store, std::span<const Quadruple> events, Timestamp time_unit,
                         double percentile) {
  std::vector<double> offsets;
  for (const auto& e : events) {
    const auto window = store.history(e.subject, e.predicate, e.time, 1);
    if (window.entries.empty()) continue;
    offsets.push_back(query_offset(window, e.time, time_unit, 0.0));
  }
  if (offsets.empty()) return std::log(2.0);
  std::sort(offsets.begin(), offsets.end());
  const auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(offsets.size())));
  return offsets[std::clamp<std::size_t>(rank, 1, offsets.size()) - 1];
}

Dataset build_dataset(Dictionary entities, Dictionary predicates, Splits raw) {
  check_split_order(raw);
  Dataset d;
  d.entities = std::move(entities);
  d.predicates = std::move(predicates);
  d.meta.num_entities = d.entities.size();
  d.meta.num_raw_predicates = d.predicates.size();
  d.raw = std::move(raw);
  d.events.train = add_reciprocals(d.raw.train, d.meta.num_raw_predicates);
  d.events.valid = add_reciprocals(d.raw.valid, d.meta.num_raw_predicates);
  d.events.test = add_reciprocals(d.raw.test, d.meta.num_raw_predicates);

  std::vector<Quadruple> all;
  all.reserve(d.events.train.size() + d.events.valid.size() + d.events.test.size());
  for (const auto* split : {&d.events.train, &d.events.valid, &d.events.test}) {
    all.insert(all.end(), split->begin(), split->end());
  }
  d.meta.time_unit = base_time_unit(all);
  d.store = GraphStore(build_slices(all));
  d.meta.num_slices = d.store.slices().size();
  d.filter = build_filter_index(d.events.train, d.events.valid, d.events.test);
  d.meta.tau_max = offset_percentile(d.store, d.events.train, d.meta.time_unit);
  return d;
}

Dataset prepare_from_files(std::span<const std::filesystem::path> inputs) {
  if (inputs.size() != 1 && inputs.size() != 3) {
    throw Error(ErrorCategory::kConfig, "prepare: expected one input file or three (train, valid, test)");
  }
  std::optional<DictionaryPair> dictionaries;
  std::vector<std::vector<Quadruple>> parts;
  for (const auto& path : inputs) {
    auto in = open_input(path);
    ParsedQuadruples parsed;
    try {
      parsed = parse_quadruples(in, std::move(dictionaries));
    } catch (const Error& e) {
      throw Error(e.category(), path.string() + ": " + e.what());
    }
    parts.push_back(std::move(parsed.quadruples));
    dictionaries = DictionaryPair{std::move(parsed.entities), std::move(parsed.predicates)};
  }
  Splits raw;
  if (parts.size() == 1) {
    raw = split_by_time(parts[0]);
  } else {
    raw = {std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
  }
  return build_dataset(std::move(dictionaries->entities), std::move(dictionaries->predicates), std::move(raw));
}

std::string file_checksum(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

std::map<std::string, std::string> write_prepared(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_output(dir / "entities.tsv");
    dataset.entities.write_tsv(out);
  }
  {
    auto out = open_output(dir / "predicates.tsv");
    dataset.predicates.write_tsv(out);
  }
  write_quadruples(dir / "train.tsv", dataset.raw.train);
  write_quadruples(dir / "valid.tsv", dataset.raw.valid);
  write_quadruples(dir / "test.tsv", dataset.raw.test);
  {
    auto out = open_output(dir / "slices.bin");
    dataset.store.write_binary(out);
  }
  {
    auto out = open_output(dir / "filter.tsv");
    dataset.filter.write_tsv(out);
  }
  std::map<std::string, std::string> checksums;
  for (const char* name :
       std::span(kPreparedFiles).first(std::size(kPreparedFiles) - 1)) {
    checksums[name] = file_checksum(dir / name);
  }
  nlohmann::json meta = {
      {"format_version", 1},
      {"num_entities", dataset.meta.num_entities},
      {"num_raw_predicates", dataset.meta.num_raw_predicates},
      {"num_predicates_with_reciprocals", dataset.num_predicates()},
      {"time_unit", dataset.meta.time_unit},
      {"tau_max", dataset.meta.tau_max},
      {"num_slices", dataset.meta.num_slices},
      {"split_sizes",
       {{"train", dataset.raw.train.size()}, {"valid", dataset.raw.valid.size()}, {"test", dataset.raw.test.size()}}},
      {"checksums", checksums},
  };
  auto out = open_output(dir / "meta.json");
  out << meta.dump(2) << '\n';
  out.close();
  checksums["meta.json"] = file_checksum(dir / "meta.json");
  return checksums;
}

Dataset load_prepared(const std::filesystem::path& dir) {
  nlohmann::json meta;
  {
    auto in = open_input(dir / "meta.json");
    try {
      meta = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCategory::kParse, (dir / "meta.json").string() + ": " + e.what());
    }
  }
  if (meta.value("format_version", 0) != 1) {
    throw Error(ErrorCategory::kCompatibility, (dir / "meta.json").string() + ": unsupported format version");
  }
  for (const auto& [name, digest] : meta.at("checksums").items()) {
    if (file_checksum(dir / name) != digest.get<std::string>()) {
      throw Error(ErrorCategory::kIo, (dir / name).string() + ": checksum mismatch with meta.json");
    }
  }
  Dataset d;
  {
    auto in = open_input(dir / "entities.tsv");
    d.entities = Dictionary::read_tsv(in);
  }
  {
    auto in = open_input(dir / "predicates.tsv");
    d.predicates = Dictionary::read_tsv(in);
  }
  d.entities.freeze();
  d.predicates.freeze();
  d.meta.num_entities = meta.at("num_entities").get<std::uint32_t>();
  d.meta.num_raw_predicates = meta.at("num_raw_predicates").get<std::uint32_t>();
  d.meta.time_unit = meta.at("time_unit").get<Timestamp>();
  d.meta.tau_max = meta.at("tau_max").get<double>();
  d.meta.num_slices = meta.at("num_slices").get<std::size_t>();
  if (d.meta.num_entities != d.entities.size() || d.meta.num_raw_predicates != d.predicates.size()) {
    throw Error(ErrorCategory::kCompatibility, dir.string() + ": dictionary sizes disagree with meta.json");
  }
  d.raw.train = read_quadruples(dir / "train.tsv");
  d.raw.valid = read_quadruples(dir / "valid.tsv");
  d.raw.test = read_quadruples(dir / "test.tsv");
  d.events.train = add_reciprocals(d.raw.train, d.meta.num_raw_predicates);
  d.events.valid = add_reciprocals(d.raw.valid, d.meta.num_raw_predicates);
  d.events.test = add_reciprocals(d.raw.test, d.meta.num_raw_predicates);
  {
    auto in = open_input(dir / "slices.bin");
    d.store = GraphStore::read_binary(in);
  }
  {
    auto in = open_input(dir / "filter.tsv");
    d.filter = FilterIndex::read_tsv(in);
  }
  return d;
}

}  // namespace wgpnn
