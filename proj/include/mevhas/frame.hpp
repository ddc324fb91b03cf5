/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_FRAME_HPP_
#define MEVHAS_FRAME_HPP_

#include <cstdint>
#include <vector>

namespace mevhas {

// Single 8-bit luma plane, row-major.
struct LumaFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;  // size == width * height

  LumaFrame() = default;
  LumaFrame(int w, int h, std::uint8_t fill = 0);
  LumaFrame(int w, int h, std::vector<std::uint8_t> s);

  std::uint8_t at(int x, int y) const {
    return samples[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return samples[static_cast<std::size_t>(y) * width + x];
  }

  bool operator==(const LumaFrame&) const = default;
};

struct Fps {
  int num = 0;
  int den = 1;

  double to_double() const { return static_cast<double>(num) / den; }
  bool valid() const { return num > 0 && den > 0; }
  bool operator==(const Fps&) const = default;
};

// Decoded luma planes in display order. All frames share one geometry.
struct VideoSequence {
  std::vector<LumaFrame> frames;
  Fps fps{30, 1};
};

// 2:1 box downscale: every output sample is the mean of the corresponding
// 2x2 input block, rounded half up. Both dimensions must be even.
LumaFrame downscale_half(const LumaFrame& frame);

// Drops at most one rightmost column and one bottom row so that both
// dimensions are even. Throws if the result would be smaller than 8x8.
LumaFrame crop_to_even(const LumaFrame& frame);

// Extends the plane to the next multiple of `multiple` in each dimension by
// edge replication. Identity when already aligned.
LumaFrame pad_replicate(const LumaFrame& frame, int multiple);

}  // namespace mevhas

#endif  // MEVHAS_FRAME_HPP_
