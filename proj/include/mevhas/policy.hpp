/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_POLICY_HPP_
#define MEVHAS_POLICY_HPP_

#include "mevhas/encoder.hpp"
#include "mevhas/gate.hpp"
#include "mevhas/partition_map.hpp"

namespace mevhas {

// Gating policy backed by an interpolated reference partition map: each node
// compares its area against the mapped CU area at its top-left corner.
class MapGatingPolicy : public GatingPolicy {
 public:
  explicit MapGatingPolicy(PartitionMap map);

  // The interpolated map may extend past the padded frame (reference padding
  // doubles), so it has to cover the frame rather than equal it.
  void validate_frame(int padded_width, int padded_height) const override;

  GateDecision decide(const CodingBlock& block,
                      bool qt_restricted) const override;

  const PartitionMap& map() const { return map_; }

 private:
  PartitionMap map_;
};

// Returns the same decision at every node. The FullRdo instance reproduces
// the ungated search exactly.
class FixedDecisionPolicy : public GatingPolicy {
 public:
  explicit FixedDecisionPolicy(GateDecision decision) : decision_(decision) {}

  GateDecision decide(const CodingBlock&, bool) const override {
    return decision_;
  }

 private:
  GateDecision decision_;
};

}  // namespace mevhas

#endif  // MEVHAS_POLICY_HPP_
