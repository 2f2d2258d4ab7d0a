#pragma once

// Per-run record written by every CLI command. Everything in it is a function
// of the inputs and settings, so deterministic reruns reproduce it byte for
// byte; wall-clock timings go to a separate timings.json.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace wgpnn {

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::map<std::string, std::string> config;
  /// Path as given -> checksum.
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  std::optional<std::uint64_t> seed;
  std::string version = kVersion;

  /// A directory is taken to be a prepared dataset.
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

}  // namespace wgpnn
