/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_PARTITION_MAP_HPP_
#define MEVHAS_PARTITION_MAP_HPP_

#include <cstdint>
#include <string>

#include "mevhas/block.hpp"

namespace mevhas {

struct CuSize {
  std::uint16_t width = 0;
  std::uint16_t height = 0;

  bool operator==(const CuSize&) const = default;
};

inline constexpr int kMapCellSize = 8;

// Per-cell CU geometry of one encoded frame at 8-pixel granularity. Each
// cell stores the width and height of the final CU covering it.
struct PartitionMap {
  int frame_width = 0;   // padded, CTU multiple
  int frame_height = 0;
  int cell_size = kMapCellSize;
  int source_qp = 0;     // QP the mapped encode ran at
  std::vector<CuSize> cells;  // row-major, rows x cols

  int cols() const { return frame_width / cell_size; }
  int rows() const { return frame_height / cell_size; }
  const CuSize& cell(int cx, int cy) const {
    return cells[static_cast<std::size_t>(cy) * cols() + cx];
  }
  CuSize& cell(int cx, int cy) {
    return cells[static_cast<std::size_t>(cy) * cols() + cx];
  }

  bool operator==(const PartitionMap&) const = default;
};

// Builds the map from a final CU record. The record must tile the given
// padded dimensions.
PartitionMap extract_map(const PartitionRecord& record, int padded_width,
                         int padded_height, int source_qp = 0);

// Doubles the grid along each axis and scales every CU dimension by two,
// clamped to the 128-pixel CTU size: one low-resolution CTU turns into four
// high-resolution ones.
PartitionMap interpolate_2x(const PartitionMap& low);

// Area of the CU covering pixel (x, y); callers pass a block's top-left
// corner. Throws when the point lies outside the map.
std::int64_t max_sz_lookup(const PartitionMap& map, int x, int y);

// Text format: one header line
//   MEVHASMAP 1 <frame_w> <frame_h> <ctu_size> <cell_size> <qp>
// then, per CTU in raster order, two lines of 256 integers: the cell widths
// (row-major inside the CTU) and the cell heights.
std::string serialize_map(const PartitionMap& map);
PartitionMap parse_map(const std::string& text);

void write_map_file(const std::string& path, const PartitionMap& map);
PartitionMap read_map_file(const std::string& path);

}  // namespace mevhas

#endif  // MEVHAS_PARTITION_MAP_HPP_
