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

// Seed fan-out and rounding helpers shared by every module.
//
// A run has one master seed. Each consumer (dataset synthesis, splits,
// partitioning, noise, client sampling, per-client local work) draws from
// its own stream obtained by hashing the master seed with a stream tag and
// up to two integer coordinates (typically client id and round). Streams
// never share state, so changing the number of rounds or the set of arms
// does not perturb the randomness of earlier rounds.

#ifndef GCFL_RANDOM_H_
#define GCFL_RANDOM_H_

#include <cstdint>
#include <random>

namespace gcfl {

using Rng = std::mt19937_64;

enum class SeedStream : std::uint64_t {
  kDataset = 1,
  kSplit = 2,
  kPartition = 3,
  kNoise = 4,
  kModelInit = 5,
  kClientSampling = 6,
  kClientRound = 7,
  kInitCoreset = 8,
  kServer = 9,
};

// splitmix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t DeriveSeed(std::uint64_t master, SeedStream stream,
                                   std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = Mix64(master);
  h = Mix64(h ^ static_cast<std::uint64_t>(stream));
  h = Mix64(h ^ a);
  return Mix64(h ^ (b + 0x632be59bd9b4e019ULL));
}

inline Rng MakeRng(std::uint64_t master, SeedStream stream, std::uint64_t a = 0,
                   std::uint64_t b = 0) {
  return Rng(DeriveSeed(master, stream, a, b));
}

// Round half away from zero; used for every "round(fraction * count)".
std::int64_t RoundHalfAway(double x);

// round(fraction * n) as a count, clamped to [0, n].
std::size_t FractionCount(double fraction, std::size_t n);

}  // namespace gcfl

#endif  // GCFL_RANDOM_H_
