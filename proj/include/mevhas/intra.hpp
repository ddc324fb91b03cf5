/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_INTRA_HPP_
#define MEVHAS_INTRA_HPP_

#include <cstdint>
#include <vector>

#include "mevhas/block.hpp"
#include "mevhas/frame.hpp"

namespace mevhas {

// Declaration order doubles as the tie-break order.
enum class IntraMode : std::uint8_t { kDc = 0, kPlanar, kHorizontal, kVertical };

constexpr int kNumIntraModes = 4;

const char* intra_mode_name(IntraMode mode);

// Reference samples for one block: the reconstructed row above and column
// left of it. Where the frame ends (y == 0 or x == 0) the frame edge is
// replicated outward, from the reconstruction when a perpendicular
// neighbor exists and from the source plane otherwise, so constant content
// always predicts exactly.
struct IntraNeighbors {
  std::vector<std::uint8_t> top;   // size == block width
  std::vector<std::uint8_t> left;  // size == block height
  std::uint8_t top_left = 128;
};

IntraNeighbors gather_neighbors(const LumaFrame& orig, const LumaFrame& recon,
                                const CodingBlock& block);

// Writes the prediction for `mode` into `pred` (row-major block.width x
// block.height).
void predict_block(IntraMode mode, const IntraNeighbors& neighbors,
                   const CodingBlock& block, std::uint8_t* pred);

struct ModeDecision {
  IntraMode mode = IntraMode::kDc;
  std::int64_t distortion = 0;  // pixel-domain SSE of the winner
  std::int64_t bits = 0;
};

// Runs the four intra modes through transform_quant, reconstructs the
// cheapest (J = D + lambda * R, ties by declaration order) into `recon`, and
// adds 4 to stats.mode_evaluations.
ModeDecision evaluate_modes(const LumaFrame& orig, LumaFrame& recon,
                            const CodingBlock& block,
                            const EncoderConfig& config, EncodeStats* stats);

}  // namespace mevhas

#endif  // MEVHAS_INTRA_HPP_
