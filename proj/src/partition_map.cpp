/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/partition_map.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mevhas {

namespace {

constexpr int kCtuSize = 128;
constexpr int kMaxCuSize = 128;

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("partition map: " + what);
}

bool legal_cu_dim(int v) {
  return v >= kMapCellSize && v <= kMaxCuSize &&
         std::has_single_bit(static_cast<unsigned>(v));
}

}  // namespace

PartitionMap extract_map(const PartitionRecord& record, int padded_width,
                         int padded_height, int source_qp) {
  if (record.frame_width != padded_width ||
      record.frame_height != padded_height) {
    std::ostringstream msg;
    msg << "record covers " << record.frame_width << "x"
        << record.frame_height << ", expected " << padded_width << "x"
        << padded_height;
    fail(msg.str());
  }
  if (!is_tiling(record)) {
    fail("record is not a disjoint cover of the padded frame");
  }
  PartitionMap map;
  map.frame_width = padded_width;
  map.frame_height = padded_height;
  map.source_qp = source_qp;
  map.cells.assign(static_cast<std::size_t>(map.cols()) * map.rows(),
                   CuSize{});
  for (const CuRect& cu : record.cus) {
    const auto size = CuSize{static_cast<std::uint16_t>(cu.w),
                             static_cast<std::uint16_t>(cu.h)};
    for (int cy = cu.y / kMapCellSize; cy < (cu.y + cu.h) / kMapCellSize;
         ++cy) {
      for (int cx = cu.x / kMapCellSize; cx < (cu.x + cu.w) / kMapCellSize;
           ++cx) {
        map.cell(cx, cy) = size;
      }
    }
  }
  return map;
}

PartitionMap interpolate_2x(const PartitionMap& low) {
  PartitionMap high;
  high.frame_width = low.frame_width * 2;
  high.frame_height = low.frame_height * 2;
  high.cell_size = low.cell_size;
  high.source_qp = low.source_qp;
  high.cells.assign(static_cast<std::size_t>(high.cols()) * high.rows(),
                    CuSize{});
  for (int cy = 0; cy < low.rows(); ++cy) {
    for (int cx = 0; cx < low.cols(); ++cx) {
      const CuSize& src = low.cell(cx, cy);
      const CuSize scaled{
          static_cast<std::uint16_t>(std::min(2 * src.width, kMaxCuSize)),
          static_cast<std::uint16_t>(std::min(2 * src.height, kMaxCuSize))};
      high.cell(2 * cx, 2 * cy) = scaled;
      high.cell(2 * cx + 1, 2 * cy) = scaled;
      high.cell(2 * cx, 2 * cy + 1) = scaled;
      high.cell(2 * cx + 1, 2 * cy + 1) = scaled;
    }
  }
  return high;
}

std::int64_t max_sz_lookup(const PartitionMap& map, int x, int y) {
  if (x < 0 || y < 0 || x >= map.frame_width || y >= map.frame_height) {
    std::ostringstream msg;
    msg << "point (" << x << ", " << y << ") outside map "
        << map.frame_width << "x" << map.frame_height;
    fail(msg.str());
  }
  const CuSize& cell = map.cell(x / map.cell_size, y / map.cell_size);
  return static_cast<std::int64_t>(cell.width) * cell.height;
}

std::string serialize_map(const PartitionMap& map) {
  if (map.frame_width % kCtuSize != 0 || map.frame_height % kCtuSize != 0) {
    std::ostringstream msg;
    msg << "map dimensions " << map.frame_width << "x" << map.frame_height
        << " are not CTU multiples";
    fail(msg.str());
  }
  const int cells_per_row = kCtuSize / map.cell_size;
  std::ostringstream out;
  out << "MEVHASMAP 1 " << map.frame_width << " " << map.frame_height << " "
      << kCtuSize << " " << map.cell_size << " " << map.source_qp << "\n";
  for (int ty = 0; ty < map.frame_height / kCtuSize; ++ty) {
    for (int tx = 0; tx < map.frame_width / kCtuSize; ++tx) {
      for (int component = 0; component < 2; ++component) {
        for (int cy = 0; cy < cells_per_row; ++cy) {
          for (int cx = 0; cx < cells_per_row; ++cx) {
            const CuSize& cell =
                map.cell(tx * cells_per_row + cx, ty * cells_per_row + cy);
            if (cy != 0 || cx != 0) out << ' ';
            out << (component == 0 ? cell.width : cell.height);
          }
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

PartitionMap parse_map(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next_line()) fail("empty input");
  std::istringstream header(line);
  std::string magic;
  int version = 0, frame_w = 0, frame_h = 0, ctu = 0, cell = 0, qp = 0;
  header >> magic >> version >> frame_w >> frame_h >> ctu >> cell >> qp;
  if (magic != "MEVHASMAP" || header.fail()) {
    std::ostringstream msg;
    msg << "malformed header at line " << line_no;
    fail(msg.str());
  }
  if (version != 1) {
    std::ostringstream msg;
    msg << "unsupported version " << version << " at line " << line_no;
    fail(msg.str());
  }
  if (ctu != kCtuSize || cell != kMapCellSize) {
    std::ostringstream msg;
    msg << "unsupported geometry ctu=" << ctu << " cell=" << cell
        << " at line " << line_no;
    fail(msg.str());
  }
  if (frame_w <= 0 || frame_h <= 0 || frame_w % ctu != 0 ||
      frame_h % ctu != 0) {
    std::ostringstream msg;
    msg << "frame dimensions " << frame_w << "x" << frame_h
        << " are not CTU multiples at line " << line_no;
    fail(msg.str());
  }

  PartitionMap map;
  map.frame_width = frame_w;
  map.frame_height = frame_h;
  map.cell_size = cell;
  map.source_qp = qp;
  map.cells.assign(static_cast<std::size_t>(map.cols()) * map.rows(),
                   CuSize{});

  const int cells_per_row = ctu / cell;
  const int values_per_line = cells_per_row * cells_per_row;
  for (int ty = 0; ty < frame_h / ctu; ++ty) {
    for (int tx = 0; tx < frame_w / ctu; ++tx) {
      for (int component = 0; component < 2; ++component) {
        if (!next_line()) {
          std::ostringstream msg;
          msg << "missing data for CTU (" << tx << ", " << ty
              << ") after line " << line_no;
          fail(msg.str());
        }
        std::istringstream values(line);
        for (int i = 0; i < values_per_line; ++i) {
          int v = 0;
          if (!(values >> v)) {
            std::ostringstream msg;
            msg << "expected " << values_per_line << " values at line "
                << line_no;
            fail(msg.str());
          }
          if (!legal_cu_dim(v)) {
            std::ostringstream msg;
            msg << "illegal CU dimension " << v << " at line " << line_no
                << " (want a power of two in [8, 128])";
            fail(msg.str());
          }
          const int cx = tx * cells_per_row + i % cells_per_row;
          const int cy = ty * cells_per_row + i / cells_per_row;
          CuSize& target = map.cell(cx, cy);
          if (component == 0) {
            target.width = static_cast<std::uint16_t>(v);
          } else {
            target.height = static_cast<std::uint16_t>(v);
          }
        }
        int extra = 0;
        if (values >> extra) {
          std::ostringstream msg;
          msg << "expected " << values_per_line << " values at line "
              << line_no;
          fail(msg.str());
        }
      }
    }
  }
  if (next_line()) {
    std::ostringstream msg;
    msg << "unexpected trailing data at line " << line_no;
    fail(msg.str());
  }
  return map;
}

void write_map_file(const std::string& path, const PartitionMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open '" + path + "' for writing");
  out << serialize_map(map);
}

PartitionMap read_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_map(buffer.str());
}

}  // namespace mevhas
