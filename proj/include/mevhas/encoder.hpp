/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_ENCODER_HPP_
#define MEVHAS_ENCODER_HPP_

#include <iosfwd>

#include "mevhas/block.hpp"
#include "mevhas/frame.hpp"
#include "mevhas/gate.hpp"

namespace mevhas {

// Per-node hook consulted by the partition search. Implementations must be
// pure with respect to the encode (no mutable state shared with it).
class GatingPolicy {
 public:
  virtual ~GatingPolicy() = default;

  // Called once per encode with the padded frame geometry; throws when the
  // policy cannot serve that frame.
  virtual void validate_frame(int padded_width, int padded_height) const {}

  virtual GateDecision decide(const CodingBlock& block,
                              bool qt_restricted) const = 0;
};

struct EncodeResult {
  LumaFrame recon;
  EncodeStats stats;
  PartitionRecord record;
};

// All-intra encode of one frame. The frame is padded to CTU multiples by
// edge replication, CTUs are searched in raster order with an exhaustive
// recursive partition RDO (optionally gated by `policy`), and the
// reconstruction is cropped back to the input size. Deterministic up to
// stats.wall_time.
EncodeResult encode_frame(const LumaFrame& frame, const EncoderConfig& config,
                          const GatingPolicy* policy = nullptr);

// EncodeStats as a single JSON object.
void write_stats_json(std::ostream& out, const EncodeStats& stats);

}  // namespace mevhas

#endif  // MEVHAS_ENCODER_HPP_
