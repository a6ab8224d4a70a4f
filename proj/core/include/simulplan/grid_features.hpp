// Copyright 2026 The simulplan Authors.
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

#ifndef SIMULPLAN_GRID_FEATURES_HPP_
#define SIMULPLAN_GRID_FEATURES_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "simulplan/grid_arena.hpp"

namespace simulplan::grid {

inline constexpr int kNumPlanes = 14;

/// Plane layout of a GridObservation.
enum Plane : int {
  kPlaneRigid = 0,
  kPlaneWood = 1,
  kPlaneBomb = 2,
  kPlaneFlame = 3,
  kPlaneExtraBomb = 4,
  kPlaneBlastRange = 5,
  kPlaneSelf = 6,
  kPlaneOpponent1 = 7,  // next seat after the observer
  kPlaneOpponent2 = 8,
  kPlaneOpponent3 = 9,
  kPlaneBombStrength = 10,
  kPlaneBombLife = 11,
  kPlaneOwnCapacity = 12,
  kPlaneOwnStrength = 13,
};

/// Observation as small integers per (plane, row, col) plus one scale per
/// plane; value = code * scale. This is the storage form of replay samples.
struct ObservationCodes {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> codes;  // plane-major
  std::array<float, kNumPlanes> scale{};
};

/// 14 feature planes, each height x width, values in [0, 1].
struct GridObservation {
  int height = 0;
  int width = 0;
  std::vector<float> values;  // plane-major

  int size() const { return static_cast<int>(values.size()); }
  float at(int plane, int row, int col) const {
    return values[static_cast<std::size_t>((plane * height + row) * width + col)];
  }
};

/// Partial observation of `player`: no hidden power-ups and nothing about
/// other agents' collected power-ups.
ObservationCodes encode_observation(const GridState& state, PlayerId player);
GridObservation decode_observation(const ObservationCodes& codes);
GridObservation featurize(const GridState& state, PlayerId player);

inline int feature_size(int height, int width) { return kNumPlanes * height * width; }

}  // namespace simulplan::grid

#endif  // SIMULPLAN_GRID_FEATURES_HPP_
