/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/block.hpp"

#include <bit>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mevhas {

const char* split_name(SplitType split) {
  switch (split) {
    case SplitType::kNoSplit:
      return "NS";
    case SplitType::kQt:
      return "QT";
    case SplitType::kBtHor:
      return "BT_H";
    case SplitType::kBtVer:
      return "BT_V";
    case SplitType::kTtHor:
      return "TT_H";
    case SplitType::kTtVer:
      return "TT_V";
  }
  return "?";
}

void EncoderConfig::validate() const {
  if (qp < 0 || qp > 51) {
    std::ostringstream msg;
    msg << "qp " << qp << " outside [0, 51]";
    throw std::invalid_argument(msg.str());
  }
  if (ctu_size < 8 || !std::has_single_bit(static_cast<unsigned>(ctu_size))) {
    throw std::invalid_argument("ctu_size must be a power of two >= 8");
  }
  if (min_cu < 8 || !std::has_single_bit(static_cast<unsigned>(min_cu)) ||
      ctu_size % min_cu != 0) {
    throw std::invalid_argument("min_cu must be a power of two dividing ctu_size");
  }
  if (max_mt_depth < 0) {
    throw std::invalid_argument("max_mt_depth must be non-negative");
  }
  if (lambda_scale <= 0.0) {
    throw std::invalid_argument("lambda_scale must be positive");
  }
}

SplitSet allowed_splits(const CodingBlock& block, const EncoderConfig& config,
                        int frame_width, int frame_height) {
  const int min_cu = config.min_cu;
  const bool qt_legal = block.width == block.height &&
                        block.width >= 2 * min_cu && !block.in_mt_subtree;

  const bool starts_inside = block.x < frame_width && block.y < frame_height;
  const bool crosses_right = starts_inside && block.x + block.width > frame_width;
  const bool crosses_bottom =
      starts_inside && block.y + block.height > frame_height;

  SplitSet set;
  if (crosses_right || crosses_bottom) {
    // Implicit split: the MT depth cap does not apply, the QT prohibition
    // inside BT/TT subtrees does. Blocks too small to split keep NS so the
    // tiling always completes.
    if (qt_legal) {
      set.add(SplitType::kQt);
    } else if (crosses_bottom && block.height >= 2 * min_cu) {
      set.add(SplitType::kBtHor);
    } else if (crosses_right && block.width >= 2 * min_cu) {
      set.add(SplitType::kBtVer);
    } else {
      set.add(SplitType::kNoSplit);
    }
    return set;
  }

  if (block.area() >= static_cast<std::int64_t>(min_cu) * min_cu) {
    set.add(SplitType::kNoSplit);
  }
  if (qt_legal) {
    set.add(SplitType::kQt);
  }
  if (block.mt_depth < config.max_mt_depth) {
    if (block.height >= 2 * min_cu) set.add(SplitType::kBtHor);
    if (block.width >= 2 * min_cu) set.add(SplitType::kBtVer);
    if (block.height >= 4 * min_cu) set.add(SplitType::kTtHor);
    if (block.width >= 4 * min_cu) set.add(SplitType::kTtVer);
  }
  return set;
}

ChildList split_children(const CodingBlock& block, SplitType split) {
  ChildList children;
  auto add = [&](int x, int y, int w, int h, bool mt) {
    CodingBlock child = block;
    child.x = x;
    child.y = y;
    child.width = w;
    child.height = h;
    if (mt) {
      child.mt_depth = block.mt_depth + 1;
      child.in_mt_subtree = true;
    } else {
      child.qt_depth = block.qt_depth + 1;
    }
    children.blocks[children.count++] = child;
  };

  const int x = block.x;
  const int y = block.y;
  const int w = block.width;
  const int h = block.height;
  switch (split) {
    case SplitType::kNoSplit:
      throw std::invalid_argument("NS has no children");
    case SplitType::kQt:
      add(x, y, w / 2, h / 2, false);
      add(x + w / 2, y, w / 2, h / 2, false);
      add(x, y + h / 2, w / 2, h / 2, false);
      add(x + w / 2, y + h / 2, w / 2, h / 2, false);
      break;
    case SplitType::kBtHor:
      add(x, y, w, h / 2, true);
      add(x, y + h / 2, w, h / 2, true);
      break;
    case SplitType::kBtVer:
      add(x, y, w / 2, h, true);
      add(x + w / 2, y, w / 2, h, true);
      break;
    case SplitType::kTtHor:
      add(x, y, w, h / 4, true);
      add(x, y + h / 4, w, h / 2, true);
      add(x, y + 3 * h / 4, w, h / 4, true);
      break;
    case SplitType::kTtVer:
      add(x, y, w / 4, h, true);
      add(x + w / 4, y, w / 2, h, true);
      add(x + 3 * w / 4, y, w / 4, h, true);
      break;
  }
  return children;
}

bool is_tiling(const PartitionRecord& record) {
  if (record.frame_width <= 0 || record.frame_height <= 0) return false;
  constexpr int kGrid = 8;
  if (record.frame_width % kGrid != 0 || record.frame_height % kGrid != 0) {
    return false;
  }
  const int cols = record.frame_width / kGrid;
  const int rows = record.frame_height / kGrid;
  std::vector<std::uint8_t> covered(static_cast<std::size_t>(cols) * rows, 0);
  for (const CuRect& cu : record.cus) {
    if (cu.w <= 0 || cu.h <= 0 || cu.x % kGrid != 0 || cu.y % kGrid != 0 ||
        cu.w % kGrid != 0 || cu.h % kGrid != 0) {
      return false;
    }
    if (cu.x < 0 || cu.y < 0 || cu.x + cu.w > record.frame_width ||
        cu.y + cu.h > record.frame_height) {
      return false;
    }
    for (int cy = cu.y / kGrid; cy < (cu.y + cu.h) / kGrid; ++cy) {
      for (int cx = cu.x / kGrid; cx < (cu.x + cu.w) / kGrid; ++cx) {
        std::uint8_t& cell = covered[static_cast<std::size_t>(cy) * cols + cx];
        if (cell != 0) return false;  // overlap
        cell = 1;
      }
    }
  }
  for (const std::uint8_t cell : covered) {
    if (cell == 0) return false;  // gap
  }
  return true;
}

void write_record_jsonl(std::ostream& out, const PartitionRecord& record,
                        int frame_index) {
  for (const CuRect& cu : record.cus) {
    out << "{\"frame\":" << frame_index << ",\"x\":" << cu.x
        << ",\"y\":" << cu.y << ",\"w\":" << cu.w << ",\"h\":" << cu.h
        << "}\n";
  }
}

}  // namespace mevhas
