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

#include "simulplan/grid_features.hpp"

#include <algorithm>

namespace simulplan::grid {

ObservationCodes encode_observation(const GridState& state, PlayerId player) {
  const int h = state.height();
  const int w = state.width();
  const int side = std::max(h, w);
  ObservationCodes obs;
  obs.height = h;
  obs.width = w;
  obs.codes.assign(static_cast<std::size_t>(kNumPlanes * h * w), 0);
  obs.scale.fill(1.0f);
  obs.scale[kPlaneBombStrength] = 1.0f / static_cast<float>(side);
  obs.scale[kPlaneBombLife] = 1.0f / static_cast<float>(state.config().fuse);
  obs.scale[kPlaneOwnCapacity] = 1.0f / static_cast<float>(kMaxCapacity);
  obs.scale[kPlaneOwnStrength] = 1.0f / static_cast<float>(side);

  auto set = [&](int plane, Position p, int code) {
    obs.codes[static_cast<std::size_t>((plane * h + p.row) * w + p.col)] = static_cast<std::uint8_t>(code);
  };

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Position p{r, c};
      switch (state.tile(p)) {
        case Tile::kRigid:
          set(kPlaneRigid, p, 1);
          break;
        case Tile::kWood:
          set(kPlaneWood, p, 1);
          break;
        case Tile::kExtraBomb:
          set(kPlaneExtraBomb, p, 1);
          break;
        case Tile::kBlastRange:
          set(kPlaneBlastRange, p, 1);
          break;
        case Tile::kPassage:
          break;
      }
      if (state.flame(p) > 0) set(kPlaneFlame, p, 1);
    }
  }
  for (const Bomb& b : state.bombs()) {
    set(kPlaneBomb, b.pos, 1);
    set(kPlaneBombStrength, b.pos, std::min<int>(b.strength, side));
    set(kPlaneBombLife, b.pos, b.fuse);
  }
  const int n = state.num_players();
  for (int k = 0; k < n; ++k) {
    const Agent& a = state.agent(PlayerId{(player.index + k) % n});
    if (a.alive) set(kPlaneSelf + k, a.pos, 1);
  }
  const Agent& me = state.agent(player);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      set(kPlaneOwnCapacity, {r, c}, me.capacity);
      set(kPlaneOwnStrength, {r, c}, std::min<int>(me.strength, side));
    }
  }
  return obs;
}

GridObservation decode_observation(const ObservationCodes& codes) {
  GridObservation obs;
  obs.height = codes.height;
  obs.width = codes.width;
  obs.values.resize(codes.codes.size());
  const std::size_t plane_size = static_cast<std::size_t>(codes.height * codes.width);
  for (std::size_t i = 0; i < codes.codes.size(); ++i) {
    obs.values[i] = static_cast<float>(codes.codes[i]) * codes.scale[i / plane_size];
  }
  return obs;
}

GridObservation featurize(const GridState& state, PlayerId player) {
  return decode_observation(encode_observation(state, player));
}

}  // namespace simulplan::grid
