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

#include "pega/config.hpp"

#include <charconv>
#include <functional>
#include <map>

#include "pega/errors.hpp"
#include "pega/text_io.hpp"

namespace pega {
namespace {

template <class T>
T to_number(std::string_view key, std::string_view value) {
  value = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw PreconditionError("invalid value '" + std::string(value) + "' for " +
                            std::string(key));
  }
  return out;
}

struct Field {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define PEGA_NUMBER_FIELD(name, expr, type)                                   \
  {name, Field{[](RunConfig& c, std::string_view v) {                         \
                 c.expr = to_number<type>(name, v);                           \
               },                                                             \
               [](const RunConfig& c) { return format_value(c.expr); }}}

std::string format_value(double v) { return format_double(v); }
std::string format_value(int v) { return std::to_string(v); }
std::string format_value(std::size_t v) { return std::to_string(v); }

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> kFields = {
      PEGA_NUMBER_FIELD("learning_rate", train.learning_rate, double),
      PEGA_NUMBER_FIELD("dropout", train.dropout, double),
      PEGA_NUMBER_FIELD("negatives", train.negatives, int),
      PEGA_NUMBER_FIELD("latent_dim", train.latent_dim, int),
      PEGA_NUMBER_FIELD("gcn_layers", train.gcn_layers, int),
      PEGA_NUMBER_FIELD("attention_layers", train.attention_layers, int),
      PEGA_NUMBER_FIELD("attention_hidden", train.attention_hidden, int),
      PEGA_NUMBER_FIELD("lambda", train.lambda, double),
      PEGA_NUMBER_FIELD("user_epochs", train.user_epochs, int),
      PEGA_NUMBER_FIELD("group_epochs", train.group_epochs, int),
      PEGA_NUMBER_FIELD("batch_size", train.batch_size, int),
      PEGA_NUMBER_FIELD("init_stddev", train.init_stddev, double),
      PEGA_NUMBER_FIELD("l2", train.l2, double),
      PEGA_NUMBER_FIELD("patience", train.patience, int),
      PEGA_NUMBER_FIELD("seed", train.seed, std::size_t),
      PEGA_NUMBER_FIELD("split_train", split.train, double),
      PEGA_NUMBER_FIELD("split_validation", split.validation, double),
      PEGA_NUMBER_FIELD("split_test", split.test, double),
      PEGA_NUMBER_FIELD("split_folds", split.folds, int),
      PEGA_NUMBER_FIELD("split_seed", split.seed, std::size_t),
      {"ks", Field{[](RunConfig& c, std::string_view v) { c.ks = parse_int_list(v); },
                   [](const RunConfig& c) { return format_int_list(c.ks); }}},
      PEGA_NUMBER_FIELD("permutation_iterations", permutation_iterations, int),
      PEGA_NUMBER_FIELD("min_reviews", min_reviews, std::size_t),
      PEGA_NUMBER_FIELD("min_review_length", min_review_length, std::size_t),
  };
  return kFields;
}

#undef PEGA_NUMBER_FIELD

}  // namespace

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  key = trim(key);
  for (const auto& [name, field] : fields()) {
    if (name == key) {
      field.set(config, value);
      return;
    }
  }
  throw PreconditionError("unknown config key '" + std::string(key) + "'");
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  const std::string source = path.string();
  for_each_record(path, [&](std::string_view line, std::size_t n) {
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, n, "expected key = value");
    try {
      apply_setting(config, line.substr(0, eq), trim(line.substr(eq + 1)));
    } catch (const PreconditionError& e) {
      throw ParseError(source, n, e.what());
    }
  });
}

KeyValues config_entries(const RunConfig& config) {
  KeyValues out;
  for (const auto& [name, field] : fields()) out.emplace_back(name, field.get(config));
  return out;
}

void validate(const RunConfig& c) {
  const TrainConfig& t = c.train;
  auto require = [](bool ok, const char* what) {
    if (!ok) throw PreconditionError(what);
  };
  require(t.learning_rate > 0.0, "learning_rate must be positive");
  require(t.dropout >= 0.0 && t.dropout < 1.0, "dropout must be in [0, 1)");
  require(t.negatives >= 1, "negatives must be >= 1");
  require(t.latent_dim >= 1, "latent_dim must be >= 1");
  require(t.gcn_layers >= 0, "gcn_layers must be >= 0");
  require(t.attention_layers >= 1, "attention_layers must be >= 1");
  require(t.attention_hidden >= 1, "attention_hidden must be >= 1");
  require(t.lambda >= 0.0, "lambda must be >= 0");
  require(t.user_epochs >= 0 && t.group_epochs >= 0, "epochs must be >= 0");
  require(t.batch_size >= 1, "batch_size must be >= 1");
  require(t.init_stddev >= 0.0, "init_stddev must be >= 0");
  require(t.l2 >= 0.0, "l2 must be >= 0");
  require(t.patience >= 0, "patience must be >= 0");
  require(!c.ks.empty(), "ks must list at least one cutoff");
  for (int k : c.ks) require(k >= 1, "every k must be >= 1");
  require(c.permutation_iterations >= 1, "permutation_iterations must be >= 1");
  c.split.validate();
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (std::string_view part : split(text, ',')) {
    part = trim(part);
    if (part.empty()) continue;
    out.push_back(to_number<int>("list", part));
  }
  if (out.empty()) throw PreconditionError("empty list '" + std::string(text) + "'");
  return out;
}

std::string format_int_list(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace pega
