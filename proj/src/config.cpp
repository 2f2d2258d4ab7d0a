#include "wgpnn/config.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "wgpnn/error.hpp"

namespace wgpnn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw Error(ErrorCategory::kConfig,
                "config: cannot parse value '" + std::string(value) + "' for key '" + std::string(key) + "'");
  }
  return out;
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

}  // namespace

void apply_setting(TrainConfig& config, std::string_view key, std::string_view value) {
  value = trim(value);
  const auto size = [&](std::size_t& field) { field = parse_value<std::size_t>(key, value); };
  const auto real = [&](double& field) { field = parse_value<double>(key, value); };
  if (key == "window_size") return size(config.window_size);
  if (key == "pseudo_points") return size(config.pseudo_points);
  if (key == "embedding_dim") return size(config.embedding_dim);
  if (key == "batch_size") return size(config.batch_size);
  if (key == "learning_rate") return real(config.learning_rate);
  if (key == "alpha") return real(config.alpha);
  if (key == "beta") return real(config.beta);
  if (key == "nu") return real(config.nu);
  if (key == "epochs") return size(config.epochs);
  if (key == "seed") {
    config.seed = parse_value<std::uint64_t>(key, value);
    return;
  }
  if (key == "patience") return size(config.patience);
  if (key == "quad_points") return size(config.quad_points);
  if (key == "jitter") return real(config.jitter);
  if (key == "tau_max") return real(config.tau_max);
  throw Error(ErrorCategory::kConfig, "config: unknown key '" + std::string(key) + "'");
}

TrainConfig parse_config(std::istream& in, TrainConfig base) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCategory::kConfig, "config line " + std::to_string(line_number) + ": expected key = value");
    }
    apply_setting(base, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  base.validate();
  return base;
}

std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& c) {
  return {
      {"window_size", std::to_string(c.window_size)},
      {"pseudo_points", std::to_string(c.pseudo_points)},
      {"embedding_dim", std::to_string(c.embedding_dim)},
      {"batch_size", std::to_string(c.batch_size)},
      {"learning_rate", format_double(c.learning_rate)},
      {"alpha", format_double(c.alpha)},
      {"beta", format_double(c.beta)},
      {"nu", format_double(c.nu)},
      {"epochs", std::to_string(c.epochs)},
      {"seed", std::to_string(c.seed)},
      {"patience", std::to_string(c.patience)},
      {"quad_points", std::to_string(c.quad_points)},
      {"jitter", format_double(c.jitter)},
      {"tau_max", format_double(c.tau_max)},
  };
}

void write_config(std::ostream& out, const TrainConfig& config) {
  for (const auto& [key, value] : config_entries(config)) out << key << " = " << value << '\n';
}

}  // namespace wgpnn
