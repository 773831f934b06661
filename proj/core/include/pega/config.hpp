// Copyright 2026 The PEGA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Flat `key = value` run configuration. Flags override the file, the file
// overrides the defaults.

#ifndef PEGA_CONFIG_HPP_
#define PEGA_CONFIG_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pega/datasets.hpp"
#include "pega/trainer.hpp"

namespace pega {

struct RunConfig {
  TrainConfig train;
  SplitSpec split;
  std::vector<int> ks{10, 20, 50};
  int permutation_iterations = 10000;
  std::size_t min_reviews = 5;
  std::size_t min_review_length = 1000;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Sets one key. Throws PreconditionError on an unknown key or bad value.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Reads `key = value` lines; '#' starts a comment. Throws ParseError with
/// the line number.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

/// Every setting in a fixed order, values formatted to round-trip.
KeyValues config_entries(const RunConfig& config);

/// Checks ranges (positive dimensions, probabilities in [0, 1), ...).
void validate(const RunConfig& config);

/// "10,20,50" -> {10, 20, 50}.
std::vector<int> parse_int_list(std::string_view text);
std::string format_int_list(const std::vector<int>& values);

}  // namespace pega

#endif  // PEGA_CONFIG_HPP_
