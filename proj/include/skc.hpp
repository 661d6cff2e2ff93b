// Copyright 2026 The skc Authors
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

#pragma once

#include "skc/baselines.hpp"
#include "skc/coreset.hpp"
#include "skc/errors.hpp"
#include "skc/eval.hpp"
#include "skc/exhaustive.hpp"
#include "skc/frank_wolfe.hpp"
#include "skc/io.hpp"
#include "skc/kmeans.hpp"
#include "skc/rng.hpp"
#include "skc/sparse_vector.hpp"
#include "skc/streaming.hpp"
#include "skc/summation.hpp"
#include "skc/weighted_set.hpp"
