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

#include "maxchoice/choice_distribution.hpp"
#include "maxchoice/config.hpp"
#include "maxchoice/degree_clt.hpp"
#include "maxchoice/harness.hpp"
#include "maxchoice/linalg.hpp"
#include "maxchoice/max_degree.hpp"
#include "maxchoice/rng.hpp"
#include "maxchoice/stats.hpp"
#include "maxchoice/toml.hpp"
#include "maxchoice/tree.hpp"
#include "maxchoice/verify.hpp"
