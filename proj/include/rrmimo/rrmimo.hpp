// SPDX-License-Identifier: Apache-2.0
//
// rrmimo - reduced-rank channel estimation library for large-scale MIMO uplinks
// Copyright (C) 2026 rrmimo contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Umbrella header: the whole library, including the experiment harness.

#include <rrmimo/types.hpp>
#include <rrmimo/rng.hpp>
#include <rrmimo/array.hpp>
#include <rrmimo/channel.hpp>
#include <rrmimo/correlation.hpp>
#include <rrmimo/pilot.hpp>
#include <rrmimo/rx.hpp>
#include <rrmimo/basis.hpp>
#include <rrmimo/spectrum.hpp>
#include <rrmimo/estimators.hpp>
#include <rrmimo/rank_aoa.hpp>

#include <rrmimo/harness/config.hpp>
#include <rrmimo/harness/result.hpp>
#include <rrmimo/harness/runner.hpp>
