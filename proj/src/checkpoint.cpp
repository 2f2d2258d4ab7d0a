#include "wgpnn/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "wgpnn/error.hpp"

namespace wgpnn {

namespace {

constexpr char kMagic[8] = {'W', 'G', 'P', 'N', 'N', 'C', 'K', 'P'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void pod(T v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void text(const std::string& s) {
    pod<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void tensor(const std::string& name, std::size_t rows, std::size_t cols, const double* data) {
    text(name);
    pod<std::uint64_t>(rows);
    pod<std::uint64_t>(cols);
    out_.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(rows * cols * sizeof(double)));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}
  template <typename T>
  T pod() {
    T v{};
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    check();
    return v;
  }
  std::string text() {
    std::string s(pod<std::uint32_t>(), '\0');
    in_.read(s.data(), static_cast<std::streamsize>(s.size()));
    check();
    return s;
  }
  void doubles(double* out, std::size_t n) {
    in_.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(n * sizeof(double)));
    check();
  }

 private:
  void check() {
    if (!in_) throw Error(ErrorCategory::kIo, source_ + ": truncated checkpoint");
  }
  std::istream& in_;
  std::string source_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCategory::kIo, "cannot write checkpoint " + path.string());
  const auto& state = checkpoint.state;
  const auto& shape = state.params.shape;
  Writer w(out);
  out.write(kMagic, sizeof(kMagic));
  w.pod<std::uint32_t>(kCheckpointVersion);
  w.pod<std::uint64_t>(checkpoint.seed);
  w.pod<std::uint64_t>(state.epoch);
  w.pod<std::uint64_t>(state.optimizer.step);
  w.pod<std::uint32_t>(shape.num_entities);
  w.pod<std::uint32_t>(shape.num_predicates);
  w.pod<std::uint64_t>(shape.embedding_dim);
  w.pod<std::uint64_t>(shape.hidden_dim);
  w.pod<std::uint64_t>(shape.pseudo_points);
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(checkpoint.metadata.size()));
  for (const auto& [key, value] : checkpoint.metadata) {
    w.text(key);
    w.text(value);
  }
  const auto blocks = state.params.blocks();
  w.pod<std::uint32_t>(static_cast<std::uint32_t>(3 * blocks.size()));
  for (const auto& b : blocks) w.tensor(b.name, b.rows, b.cols, b.values.data());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    w.tensor("adam.m/" + blocks[i].name, blocks[i].rows, blocks[i].cols, state.optimizer.first_moment[i].data());
  }
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    w.tensor("adam.v/" + blocks[i].name, blocks[i].rows, blocks[i].cols, state.optimizer.second_moment[i].data());
  }
  if (!out) throw Error(ErrorCategory::kIo, "failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCategory::kIo, "cannot open checkpoint " + path.string());
  char magic[sizeof(kMagic)] = {};
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCategory::kIo, path.string() + " is not a checkpoint (bad magic)");
  }
  Reader r(in, path.string());
  const auto version = r.pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCategory::kCompatibility, "unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint cp;
  cp.seed = r.pod<std::uint64_t>();
  cp.state.epoch = r.pod<std::uint64_t>();
  const auto adam_step = r.pod<std::uint64_t>();
  ModelShape shape;
  shape.num_entities = r.pod<std::uint32_t>();
  shape.num_predicates = r.pod<std::uint32_t>();
  shape.embedding_dim = r.pod<std::uint64_t>();
  shape.hidden_dim = r.pod<std::uint64_t>();
  shape.pseudo_points = r.pod<std::uint64_t>();
  const auto meta_count = r.pod<std::uint32_t>();
  for (std::uint32_t i = 0; i < meta_count; ++i) {
    auto key = r.text();
    cp.metadata[key] = r.text();
  }
  cp.state.params = ModelParams::zeros(shape);
  cp.state.optimizer = AdamState::for_params(cp.state.params);
  cp.state.optimizer.step = adam_step;
  auto blocks = cp.state.params.blocks();
  const auto tensor_count = r.pod<std::uint32_t>();
  if (tensor_count != 3 * blocks.size()) {
    throw Error(ErrorCategory::kCompatibility, path.string() + ": unexpected tensor count " + std::to_string(tensor_count));
  }
  for (std::uint32_t t = 0; t < tensor_count; ++t) {
    const auto name = r.text();
    const auto rows = r.pod<std::uint64_t>();
    const auto cols = r.pod<std::uint64_t>();
    const std::size_t b = t % blocks.size();
    const std::string prefix = t < blocks.size() ? "" : (t < 2 * blocks.size() ? "adam.m/" : "adam.v/");
    if (name != prefix + blocks[b].name || rows != blocks[b].rows || cols != blocks[b].cols) {
      throw Error(ErrorCategory::kCompatibility,
                  path.string() + ": tensor '" + name + "' (" + std::to_string(rows) + "x" + std::to_string(cols) +
                      ") does not match expected '" + prefix + blocks[b].name + "' (" + std::to_string(blocks[b].rows) +
                      "x" + std::to_string(blocks[b].cols) + ")");
    }
    double* dest = t < blocks.size()       ? blocks[b].values.data()
                   : t < 2 * blocks.size() ? cp.state.optimizer.first_moment[b].data()
                                           : cp.state.optimizer.second_moment[b].data();
    r.doubles(dest, rows * cols);
  }
  return cp;
}

}  // namespace wgpnn
