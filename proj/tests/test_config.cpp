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

#include <catch2/catch_amalgamated.hpp>

#include "maxchoice/config.hpp"

using namespace maxchoice;
using Catch::Matchers::WithinAbs;

TEST_CASE("parses a full table config") {
  const RunConfig config = load_run_config_from_string(R"(
# comment
[model]
beta = 1.0
d = {kind="table", support=[[1,0.5],[2,0.5]]}

[run]
horizon = 5000
checkpoint_base = 50
checkpoint_ratio = 1.5
seed = 99
replicas = 3
k_max = 4

[trackers]
leader = true
scaling = true
scaling_c = 2.5
lemma22 = true
)");
  REQUIRE(config.params.beta == 1.0);
  REQUIRE(config.params.d.values() == std::vector<std::uint32_t>{1, 2});
  REQUIRE(config.horizon == 5000);
  REQUIRE(config.checkpoint_base == 50);
  REQUIRE_THAT(config.checkpoint_ratio, WithinAbs(1.5, 1e-15));
  REQUIRE(config.master_seed == 99);
  REQUIRE(config.replicas == 3);
  REQUIRE(config.k_max == 4);
  REQUIRE(config.trackers.leader);
  REQUIRE(config.trackers.scaling);
  REQUIRE_THAT(config.trackers.scaling_c, WithinAbs(2.5, 1e-15));
  REQUIRE(config.trackers.lemma22);
}

TEST_CASE("parses a poisson config with defaults") {
  const RunConfig config = load_run_config_from_string(R"(
[model]
beta = 0.5
d = {kind="poisson", lambda=2.0, truncation=1e-12}
[run]
horizon = 1000
)");
  REQUIRE(config.params.d.kind() == ChoiceDistribution::Kind::PoissonConditioned);
  REQUIRE_THAT(config.params.d.lambda(), WithinAbs(2.0, 1e-15));
  REQUIRE(config.replicas == 1);
  REQUIRE(config.k_max == 8);
  REQUIRE(config.checkpoint_base == 100);
  REQUIRE(config.trackers.leader);
  REQUIRE_FALSE(config.trackers.scaling);
}

TEST_CASE("rejects malformed configs") {
  REQUIRE_THROWS_AS(load_run_config_from_string("[model]\nbeta = 0.0\n"),
                    ConfigError);  // missing d
  REQUIRE_THROWS_AS(load_run_config_from_string(R"(
[model]
beta = -1.0
d = {kind="table", support=[[1,1.0]]}
)"),
                    ConfigError);  // beta at the boundary
  REQUIRE_THROWS_AS(load_run_config_from_string(R"(
[model]
beta = 0.0
d = {kind="table", support=[[1,0.7],[2,0.7]]}
)"),
                    ConfigError);  // probabilities above one
  REQUIRE_THROWS_AS(load_run_config_from_string(R"(
[model]
beta = 0.0
d = {kind="gaussian"}
)"),
                    ConfigError);  // unknown kind
  REQUIRE_THROWS_AS(load_run_config_from_string(R"(
[model]
beta = 0.0
d = {kind="table", support=[[1,1.0]]}
[run]
horizon = 10
checkpoint_base = 50
)"),
                    ConfigError);  // horizon below the first checkpoint
  REQUIRE_THROWS_AS(load_run_config_from_string("[model]\nbeta = ???\n"),
                    ConfigError);  // lexer error surfaces as ConfigError
}

TEST_CASE("toml subset parses nested structures") {
  const toml::Table root = toml::parse(R"(
top = 1
[section]
text = "a # not a comment"
flag = false
nested = [[1, 2.5], [3]]
inline = {a=1, b="x"}
)");
  REQUIRE(root.at("top").as_integer("top") == 1);
  const toml::Table& section = root.at("section").as_table("section");
  REQUIRE(section.at("text").as_string("text") == "a # not a comment");
  REQUIRE(section.at("flag").as_bool("flag") == false);
  const toml::Array& nested = section.at("nested").as_array("nested");
  REQUIRE(nested.size() == 2);
  REQUIRE(nested[0].as_array("row")[1].as_number("v") == 2.5);
  REQUIRE(section.at("inline").as_table("inline").at("b").as_string("b") == "x");
}

TEST_CASE("toml subset rejects duplicates and junk") {
  REQUIRE_THROWS_AS(toml::parse("a = 1\na = 2\n"), toml::ParseError);
  REQUIRE_THROWS_AS(toml::parse("[s]\n[s]\n"), toml::ParseError);
  REQUIRE_THROWS_AS(toml::parse("a = [1, 2\n"), toml::ParseError);
  REQUIRE_THROWS_AS(toml::parse("a = \"unterminated\n"), toml::ParseError);
}
