#include "wgpnn/manifest.hpp"

#include <fstream>

#include "wgpnn/error.hpp"
#include "wgpnn/prepared.hpp"

namespace wgpnn {

void RunManifest::add_input(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    for (const char* name : kPreparedFiles) inputs[(path / name).generic_string()] = file_checksum(path / name);
    return;
  }
  inputs[path.generic_string()] = file_checksum(path);
}

void RunManifest::add_output(const std::filesystem::path& path) { outputs[path.generic_string()] = file_checksum(path); }

nlohmann::json RunManifest::to_json() const {
  nlohmann::json out = {{"command", command},   {"arguments", arguments}, {"config", config},
                        {"inputs", inputs},     {"outputs", outputs},     {"version", version}};
  out["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCategory::kIo, path.string() + ": cannot open for writing");
  out << value.dump(2) << '\n';
  if (!out) throw Error(ErrorCategory::kIo, path.string() + ": write failed");
}

}  // namespace wgpnn
