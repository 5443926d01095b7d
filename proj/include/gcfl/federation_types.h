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

// Algorithm arms and the state carried by the simulated server and clients.

#ifndef GCFL_FEDERATION_TYPES_H_
#define GCFL_FEDERATION_TYPES_H_

#include <optional>
#include <string>

#include "gcfl/coreset.h"
#include "gcfl/dataset.h"
#include "gcfl/model.h"

namespace gcfl {

enum class AlgoKind {
  kGcfl,
  kFedAvg,
  kFedProx,
  kSkyline,  // oracle arm: trains on ground-truth clean samples only
  kRandom,
  kFacilityLocation,
};

struct Algo {
  AlgoKind kind = AlgoKind::kGcfl;
  // Server fine-tunes on its validation set after every aggregation.
  bool fine_tune = false;

  // Selection-based arms train on a per-client coreset.
  bool UsesCoreset() const;
  std::string Name() const;
  bool operator==(const Algo&) const = default;
};

// gcfl | fedavg | fedprox | skyline | random | facility_location, with an
// optional "+ft" suffix.
Algo ParseAlgo(const std::string& name);

struct ServerState {
  ParamVector params;
  int round = 0;
  Dataset val_set;  // D_S; never leaves the server
  double global_lr = 1.0;
};

struct ClientState {
  ClientChunk chunk;
  std::optional<Coreset> coreset;
  double local_lr = 0.01;
  int local_epochs = 1;
};

}  // namespace gcfl

#endif  // GCFL_FEDERATION_TYPES_H_
