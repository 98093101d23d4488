//
// Copyright 2026 The locsynth Authors
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
//

// Umbrella header.

#ifndef LOCSYNTH_LOCSYNTH_HPP_
#define LOCSYNTH_LOCSYNTH_HPP_

#include "locsynth/dp.hpp"
#include "locsynth/error.hpp"
#include "locsynth/evaluation.hpp"
#include "locsynth/geometry.hpp"
#include "locsynth/io.hpp"
#include "locsynth/parallel.hpp"
#include "locsynth/partition.hpp"
#include "locsynth/pipeline.hpp"
#include "locsynth/random.hpp"
#include "locsynth/region_gen.hpp"
#include "locsynth/roadnet.hpp"
#include "locsynth/testbed.hpp"

#endif  // LOCSYNTH_LOCSYNTH_HPP_
