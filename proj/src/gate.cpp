/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/gate.hpp"

#include <sstream>
#include <stdexcept>

namespace mevhas {

const char* gate_decision_name(GateDecision decision) {
  switch (decision) {
    case GateDecision::kDefaultRdo:
      return "DefaultRdo";
    case GateDecision::kSkipModesAllowSplit:
      return "SkipModesAllowSplit";
    case GateDecision::kFullRdo:
      return "FullRdo";
    case GateDecision::kPrune:
      return "Prune";
  }
  return "?";
}

GateDecision gate(const GateInput& input) {
  if (input.qt_restricted) {
    return GateDecision::kDefaultRdo;
  }
  if (input.curr_sz > input.max_sz) {
    return GateDecision::kSkipModesAllowSplit;
  }
  if (input.curr_sz >= input.max_sz / 4) {
    return GateDecision::kFullRdo;
  }
  return GateDecision::kPrune;
}

int reference_qp_for(int dependent_qp, ReferenceQpMode mode) {
  if (mode == ReferenceQpMode::kStrict) {
    switch (dependent_qp) {
      case 42:
      case 37:
      case 32:
        return 37;
      case 27:
        return 32;
      default: {
        std::ostringstream msg;
        msg << "dependent qp " << dependent_qp
            << " outside the {27, 32, 37, 42} ladder; use extended mode";
        throw std::invalid_argument(msg.str());
      }
    }
  }
  if (dependent_qp < 0 || dependent_qp > 51) {
    std::ostringstream msg;
    msg << "dependent qp " << dependent_qp << " outside [0, 51]";
    throw std::invalid_argument(msg.str());
  }
  return dependent_qp >= 32 ? 37 : 32;
}

}  // namespace mevhas
