#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wgpnn/train.hpp"

namespace wgpnn {

/// Sets one `key` of the config from its textual value. Unknown keys and
/// unparsable values throw a config error.
void apply_setting(TrainConfig& config, std::string_view key, std::string_view value);

/// Reads "key = value" lines ('#' starts a comment) on top of `base`.
TrainConfig parse_config(std::istream& in, TrainConfig base = {});

/// Every setting in a fixed order, values printed round-trip exact.
std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& config);

void write_config(std::ostream& out, const TrainConfig& config);

}  // namespace wgpnn
