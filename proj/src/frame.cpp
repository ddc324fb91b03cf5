/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/frame.hpp"

#include <sstream>
#include <stdexcept>

namespace mevhas {

namespace {

void check_dims(int w, int h) {
  if (w < 1 || h < 1) {
    std::ostringstream msg;
    msg << "frame dimensions must be positive, got " << w << "x" << h;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

LumaFrame::LumaFrame(int w, int h, std::uint8_t fill)
    : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {
  check_dims(w, h);
}

LumaFrame::LumaFrame(int w, int h, std::vector<std::uint8_t> s)
    : width(w), height(h), samples(std::move(s)) {
  check_dims(w, h);
  if (samples.size() != static_cast<std::size_t>(w) * h) {
    std::ostringstream msg;
    msg << "sample count " << samples.size() << " does not match " << w << "x"
        << h;
    throw std::invalid_argument(msg.str());
  }
}

LumaFrame downscale_half(const LumaFrame& frame) {
  if (frame.width % 2 != 0 || frame.height % 2 != 0) {
    std::ostringstream msg;
    msg << "downscale_half requires even dimensions, got " << frame.width
        << "x" << frame.height << "; crop_to_even first";
    throw std::invalid_argument(msg.str());
  }
  LumaFrame out(frame.width / 2, frame.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const int sum = frame.at(2 * x, 2 * y) + frame.at(2 * x + 1, 2 * y) +
                      frame.at(2 * x, 2 * y + 1) +
                      frame.at(2 * x + 1, 2 * y + 1);
      out.at(x, y) = static_cast<std::uint8_t>((sum + 2) >> 2);
    }
  }
  return out;
}

LumaFrame crop_to_even(const LumaFrame& frame) {
  const int w = frame.width - frame.width % 2;
  const int h = frame.height - frame.height % 2;
  if (w < 8 || h < 8) {
    std::ostringstream msg;
    msg << "cropping " << frame.width << "x" << frame.height
        << " to even dimensions would leave less than 8x8";
    throw std::invalid_argument(msg.str());
  }
  if (w == frame.width && h == frame.height) {
    return frame;
  }
  LumaFrame out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.at(x, y) = frame.at(x, y);
    }
  }
  return out;
}

LumaFrame pad_replicate(const LumaFrame& frame, int multiple) {
  if (multiple < 1) {
    throw std::invalid_argument("pad multiple must be positive");
  }
  const int w = (frame.width + multiple - 1) / multiple * multiple;
  const int h = (frame.height + multiple - 1) / multiple * multiple;
  if (w == frame.width && h == frame.height) {
    return frame;
  }
  LumaFrame out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = y < frame.height ? y : frame.height - 1;
    for (int x = 0; x < w; ++x) {
      const int sx = x < frame.width ? x : frame.width - 1;
      out.at(x, y) = frame.at(sx, sy);
    }
  }
  return out;
}

}  // namespace mevhas
