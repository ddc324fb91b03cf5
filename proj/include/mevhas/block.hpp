/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_BLOCK_HPP_
#define MEVHAS_BLOCK_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mevhas {

// Recursion-order doubles as the tie-break order among equal-cost options.
enum class SplitType : std::uint8_t {
  kNoSplit = 0,
  kQt,
  kBtHor,
  kBtVer,
  kTtHor,
  kTtVer,
};

constexpr int kNumSplitTypes = 6;

const char* split_name(SplitType split);

// One node of the recursive partitioning. The CTU is the 128x128 root.
struct CodingBlock {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  int qt_depth = 0;
  int mt_depth = 0;
  bool in_mt_subtree = false;

  std::int64_t area() const {
    return static_cast<std::int64_t>(width) * height;
  }
};

struct EncoderConfig {
  int qp = 32;
  int ctu_size = 128;
  int min_cu = 8;
  int max_mt_depth = 3;
  double lambda_scale = 1.0;

  void validate() const;  // throws on broken invariants
};

struct EncodeStats {
  std::uint64_t mode_evaluations = 0;
  std::uint64_t nodes_visited = 0;
  std::int64_t total_bits = 0;
  std::int64_t sse = 0;
  std::uint64_t gate_fallbacks = 0;
  double wall_time = 0.0;  // seconds; the one field reruns may not reproduce
};

struct CuRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool operator==(const CuRect&) const = default;
};

// Final CU geometry of one frame. The CUs tile the padded frame exactly.
struct PartitionRecord {
  int frame_width = 0;   // padded dimensions the CUs tile
  int frame_height = 0;
  std::vector<CuRect> cus;

  bool operator==(const PartitionRecord&) const = default;
};

// Small fixed-order set of split types.
class SplitSet {
 public:
  void add(SplitType s) { bits_ |= mask(s); }
  void remove(SplitType s) { bits_ &= static_cast<std::uint8_t>(~mask(s)); }
  bool contains(SplitType s) const { return (bits_ & mask(s)) != 0; }
  bool empty() const { return bits_ == 0; }

  bool operator==(const SplitSet&) const = default;

 private:
  static std::uint8_t mask(SplitType s) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(s));
  }
  std::uint8_t bits_ = 0;
};

// Split legality for one node. `frame_width`/`frame_height` are the original
// (unpadded) frame dimensions: blocks that start inside the frame but extend
// past it are forced to a single implicit split (QT when legal, else a
// binary split toward the crossed boundary), ignoring the MT depth cap.
// Blocks fully inside the padding follow the normal rules.
SplitSet allowed_splits(const CodingBlock& block, const EncoderConfig& config,
                        int frame_width, int frame_height);

struct ChildList {
  std::array<CodingBlock, 4> blocks;
  int count = 0;
};

ChildList split_children(const CodingBlock& block, SplitType split);

// Disjoint-cover check at min-CU granularity.
bool is_tiling(const PartitionRecord& record);

// One JSON object per CU: {"frame":f,"x":..,"y":..,"w":..,"h":..}.
void write_record_jsonl(std::ostream& out, const PartitionRecord& record,
                        int frame_index);

}  // namespace mevhas

#endif  // MEVHAS_BLOCK_HPP_
