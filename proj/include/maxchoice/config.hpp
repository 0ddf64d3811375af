// Copyright 2026 The Maxchoice Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maxchoice/toml.hpp"
#include "maxchoice/tree.hpp"

namespace maxchoice {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct TrackerConfig {
  bool leader = true;    // leader identity and change counting
  bool scaling = false;  // Q/U critical-regime diagnostics
  double scaling_c = 0.0;  // 0 means: use (2+beta)^2/m_2
  bool lemma22 = false;  // running min of M(n)/n^(1/(4(2+beta)))
};

// Full description of a simulation run: model, horizon, geometric checkpoint
// schedule, seeding, replica count and the tracked observables.
struct RunConfig {
  ModelParams params;
  std::uint64_t horizon = 100000;
  std::uint64_t checkpoint_base = 100;
  double checkpoint_ratio = 1.2;
  std::uint64_t master_seed = 1;
  std::uint32_t replicas = 1;
  std::uint32_t k_max = 8;  // degree bins recorded per checkpoint
  TrackerConfig trackers;
  bool validate_checkpoints = false;  // full state rescan at each checkpoint

  explicit RunConfig(ModelParams p) : params(std::move(p)) {}

  void validate() const {
    if (checkpoint_base < 2) throw ConfigError("run: checkpoint_base must be >= 2");
    if (horizon < checkpoint_base)
      throw ConfigError("run: horizon must be >= checkpoint_base");
    if (!(checkpoint_ratio > 1.0))
      throw ConfigError("run: checkpoint_ratio must be > 1");
    if (replicas < 1) throw ConfigError("run: replicas must be >= 1");
    if (k_max < 1) throw ConfigError("run: k_max must be >= 1");
  }
};

namespace config_detail {

inline const toml::Value* find(const toml::Table& table, const std::string& key) {
  const auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

inline const toml::Value& require(const toml::Table& table, const std::string& key,
                                  const std::string& where) {
  const toml::Value* v = find(table, key);
  if (!v) throw ConfigError(where + ": missing key '" + key + "'");
  return *v;
}

}  // namespace config_detail

// d = {kind="table", support=[[1,0.5],[2,0.5]]}
// d = {kind="poisson", lambda=2.0, truncation=1e-12}
inline ChoiceDistribution parse_choice_distribution(const toml::Value& value,
                                                    const std::string& where) {
  const toml::Table& t = value.as_table(where);
  const std::string kind =
      config_detail::require(t, "kind", where).as_string(where + ".kind");
  if (kind == "table") {
    const toml::Array& rows =
        config_detail::require(t, "support", where).as_array(where + ".support");
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (const toml::Value& row : rows) {
      const toml::Array& pair = row.as_array(where + ".support entry");
      if (pair.size() != 2)
        throw ConfigError(where + ".support: entries are [value, probability]");
      const std::int64_t v = pair[0].as_integer(where + ".support value");
      if (v < 1) throw ConfigError(where + ".support: values must be >= 1");
      entries.emplace_back(static_cast<std::uint32_t>(v),
                           pair[1].as_number(where + ".support probability"));
    }
    try {
      return ChoiceDistribution::table(std::move(entries));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (kind == "poisson") {
    const double lambda =
        config_detail::require(t, "lambda", where).as_number(where + ".lambda");
    double truncation = 1e-12;
    if (const toml::Value* tv = config_detail::find(t, "truncation"))
      truncation = tv->as_number(where + ".truncation");
    try {
      return ChoiceDistribution::poisson(lambda, truncation);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  throw ConfigError(where + ": kind must be \"table\" or \"poisson\"");
}

inline ModelParams parse_model(const toml::Table& root) {
  const toml::Value* section = config_detail::find(root, "model");
  if (!section) throw ConfigError("missing [model] section");
  const toml::Table& model = section->as_table("[model]");
  const double beta =
      config_detail::require(model, "beta", "[model]").as_number("model.beta");
  ChoiceDistribution d =
      parse_choice_distribution(config_detail::require(model, "d", "[model]"),
                                "model.d");
  try {
    return ModelParams(beta, std::move(d));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

inline RunConfig parse_run_config(const toml::Table& root) {
  RunConfig config(parse_model(root));
  if (const toml::Value* section = config_detail::find(root, "run")) {
    const toml::Table& run = section->as_table("[run]");
    const auto get_u64 = [&](const char* key, std::uint64_t fallback) {
      const toml::Value* v = config_detail::find(run, key);
      if (!v) return fallback;
      const std::int64_t raw = v->as_integer(std::string("run.") + key);
      if (raw < 0) throw ConfigError(std::string("run.") + key + ": negative");
      return static_cast<std::uint64_t>(raw);
    };
    config.horizon = get_u64("horizon", config.horizon);
    config.checkpoint_base = get_u64("checkpoint_base", config.checkpoint_base);
    config.master_seed = get_u64("seed", config.master_seed);
    config.replicas = static_cast<std::uint32_t>(get_u64("replicas", config.replicas));
    config.k_max = static_cast<std::uint32_t>(get_u64("k_max", config.k_max));
    if (const toml::Value* v = config_detail::find(run, "checkpoint_ratio"))
      config.checkpoint_ratio = v->as_number("run.checkpoint_ratio");
  }
  if (const toml::Value* section = config_detail::find(root, "trackers")) {
    const toml::Table& trackers = section->as_table("[trackers]");
    if (const toml::Value* v = config_detail::find(trackers, "leader"))
      config.trackers.leader = v->as_bool("trackers.leader");
    if (const toml::Value* v = config_detail::find(trackers, "scaling"))
      config.trackers.scaling = v->as_bool("trackers.scaling");
    if (const toml::Value* v = config_detail::find(trackers, "scaling_c"))
      config.trackers.scaling_c = v->as_number("trackers.scaling_c");
    if (const toml::Value* v = config_detail::find(trackers, "lemma22"))
      config.trackers.lemma22 = v->as_bool("trackers.lemma22");
  }
  config.validate();
  return config;
}

inline RunConfig load_run_config_from_string(std::string_view text) {
  try {
    return parse_run_config(toml::parse(text));
  } catch (const toml::ParseError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_run_config_from_string(buffer.str());
}

}  // namespace maxchoice
