/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_GATE_HPP_
#define MEVHAS_GATE_HPP_

#include <cstdint>

namespace mevhas {

// Four-way outcome of the gating check for one recursion node.
enum class GateDecision : std::uint8_t {
  kDefaultRdo,          // encoder cannot QT-split here: run the normal check
  kSkipModesAllowSplit, // above the reference CU area: recurse without RDO
  kFullRdo,             // inside the two-depth window: full evaluation
  kPrune,               // below a quarter of the reference area: stop
};

const char* gate_decision_name(GateDecision decision);

struct GateInput {
  std::int64_t curr_sz = 0;   // area of the block under evaluation
  std::int64_t max_sz = 0;    // area of the interpolated reference CU
  bool qt_restricted = false; // QT split not available at this node
};

// Pure total decision function. Both area boundaries are inclusive:
// curr_sz == max_sz and curr_sz == max_sz / 4 both evaluate fully, which
// keeps exactly two halving depths inside the window.
GateDecision gate(const GateInput& input);

enum class ReferenceQpMode {
  kStrict,    // only the canonical ladder set {27, 32, 37, 42}
  kExtended,  // any QP in [0, 51]: >= 32 maps to 37, below maps to 32
};

// Reference-representation QP for a dependent encode. The mid-quality
// low-resolution encodes serve as references: QP 37 covers dependents at
// 42/37/32, QP 32 covers dependents at 27.
int reference_qp_for(int dependent_qp,
                     ReferenceQpMode mode = ReferenceQpMode::kStrict);

}  // namespace mevhas

#endif  // MEVHAS_GATE_HPP_
