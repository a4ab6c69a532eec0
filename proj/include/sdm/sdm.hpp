/* Copyright 2026 the sdm authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/// Umbrella header: class-aware spectral distribution matching toolkit.

#pragma once

#include "sdm/bench.hpp"
#include "sdm/common.hpp"
#include "sdm/config.hpp"
#include "sdm/distill.hpp"
#include "sdm/feature_set.hpp"
#include "sdm/frequency_bank.hpp"
#include "sdm/kernel.hpp"
#include "sdm/longtail.hpp"
#include "sdm/mmd.hpp"
#include "sdm/rng.hpp"
#include "sdm/spectral.hpp"
#include "sdm/verify.hpp"
