/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/policy.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace mevhas {

MapGatingPolicy::MapGatingPolicy(PartitionMap map) : map_(std::move(map)) {}

void MapGatingPolicy::validate_frame(int padded_width,
                                     int padded_height) const {
  if (map_.frame_width < padded_width || map_.frame_height < padded_height) {
    std::ostringstream msg;
    msg << "partition map covers " << map_.frame_width << "x"
        << map_.frame_height << " but the padded frame is " << padded_width
        << "x" << padded_height;
    throw std::invalid_argument(msg.str());
  }
}

GateDecision MapGatingPolicy::decide(const CodingBlock& block,
                                     bool qt_restricted) const {
  GateInput input;
  input.curr_sz = block.area();
  input.max_sz = max_sz_lookup(map_, block.x, block.y);
  input.qt_restricted = qt_restricted;
  return gate(input);
}

}  // namespace mevhas
