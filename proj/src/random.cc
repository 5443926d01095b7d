// Copyright 2026 The Authors.
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

#include "gcfl/random.h"

#include <algorithm>
#include <cmath>

namespace gcfl {

std::int64_t RoundHalfAway(double x) { return std::llround(x); }

std::size_t FractionCount(double fraction, std::size_t n) {
  const std::int64_t k = RoundHalfAway(fraction * static_cast<double>(n));
  return static_cast<std::size_t>(
      std::clamp<std::int64_t>(k, 0, static_cast<std::int64_t>(n)));
}

}  // namespace gcfl
