/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/intra.hpp"

#include <bit>
#include <limits>

#include "mevhas/transform.hpp"

namespace mevhas {

namespace {

std::uint8_t clamp_pixel(std::int32_t v) {
  if (v < 0) return 0;
  if (v > 255) return 255;
  return static_cast<std::uint8_t>(v);
}

}  // namespace

const char* intra_mode_name(IntraMode mode) {
  switch (mode) {
    case IntraMode::kDc:
      return "dc";
    case IntraMode::kPlanar:
      return "planar";
    case IntraMode::kHorizontal:
      return "horizontal";
    case IntraMode::kVertical:
      return "vertical";
  }
  return "?";
}

IntraNeighbors gather_neighbors(const LumaFrame& orig, const LumaFrame& recon,
                                const CodingBlock& block) {
  IntraNeighbors n;
  n.top.resize(block.width);
  n.left.resize(block.height);
  const bool has_top = block.y > 0;
  const bool has_left = block.x > 0;
  for (int j = 0; j < block.width; ++j) {
    n.top[j] = has_top ? recon.at(block.x + j, block.y - 1)
                       : orig.at(block.x + j, 0);
  }
  for (int i = 0; i < block.height; ++i) {
    n.left[i] = has_left ? recon.at(block.x - 1, block.y + i)
                         : orig.at(0, block.y + i);
  }
  if (has_top && has_left) {
    n.top_left = recon.at(block.x - 1, block.y - 1);
  } else if (has_left) {
    n.top_left = recon.at(block.x - 1, 0);  // row 0 replicated upward
  } else if (has_top) {
    n.top_left = recon.at(0, block.y - 1);  // column 0 replicated leftward
  } else {
    n.top_left = orig.at(0, 0);
  }
  return n;
}

void predict_block(IntraMode mode, const IntraNeighbors& neighbors,
                   const CodingBlock& block, std::uint8_t* pred) {
  const int w = block.width;
  const int h = block.height;
  switch (mode) {
    case IntraMode::kDc: {
      std::int64_t sum = 0;
      for (const auto v : neighbors.top) sum += v;
      for (const auto v : neighbors.left) sum += v;
      const auto dc =
          static_cast<std::uint8_t>((sum + (w + h) / 2) / (w + h));
      for (int i = 0; i < h * w; ++i) pred[i] = dc;
      break;
    }
    case IntraMode::kPlanar: {
      // Bilinear blend toward the last known top and left samples.
      const int log_w = std::countr_zero(static_cast<unsigned>(w));
      const int log_h = std::countr_zero(static_cast<unsigned>(h));
      const std::int32_t top_right = neighbors.top[w - 1];
      const std::int32_t bottom_left = neighbors.left[h - 1];
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          const std::int64_t hor =
              static_cast<std::int64_t>(w - 1 - j) * neighbors.left[i] +
              static_cast<std::int64_t>(j + 1) * top_right;
          const std::int64_t ver =
              static_cast<std::int64_t>(h - 1 - i) * neighbors.top[j] +
              static_cast<std::int64_t>(i + 1) * bottom_left;
          const std::int64_t value =
              ((hor << log_h) + (ver << log_w) +
               static_cast<std::int64_t>(w) * h) >>
              (log_w + log_h + 1);
          pred[static_cast<std::size_t>(i) * w + j] =
              clamp_pixel(static_cast<std::int32_t>(value));
        }
      }
      break;
    }
    case IntraMode::kHorizontal:
      for (int i = 0; i < h; ++i) {
        const std::uint8_t v = neighbors.left[i];
        for (int j = 0; j < w; ++j) {
          pred[static_cast<std::size_t>(i) * w + j] = v;
        }
      }
      break;
    case IntraMode::kVertical:
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          pred[static_cast<std::size_t>(i) * w + j] = neighbors.top[j];
        }
      }
      break;
  }
}

ModeDecision evaluate_modes(const LumaFrame& orig, LumaFrame& recon,
                            const CodingBlock& block,
                            const EncoderConfig& config, EncodeStats* stats) {
  const int w = block.width;
  const int h = block.height;
  const std::size_t count = static_cast<std::size_t>(w) * h;
  const double lambda = lambda_of_qp(config.qp, config.lambda_scale);
  const IntraNeighbors neighbors = gather_neighbors(orig, recon, block);

  thread_local std::vector<std::uint8_t> pred;
  thread_local std::vector<std::int16_t> residual;
  thread_local std::vector<std::int16_t> recon_residual;
  thread_local std::vector<std::uint8_t> candidate;
  thread_local std::vector<std::uint8_t> best_pixels;
  pred.resize(count);
  residual.resize(count);
  recon_residual.resize(count);
  candidate.resize(count);
  best_pixels.resize(count);

  ModeDecision best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int m = 0; m < kNumIntraModes; ++m) {
    const auto mode = static_cast<IntraMode>(m);
    predict_block(mode, neighbors, block, pred.data());
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * w + j;
        residual[idx] = static_cast<std::int16_t>(
            orig.at(block.x + j, block.y + i) - pred[idx]);
      }
    }
    const TransformQuantResult tq =
        transform_quant(residual.data(), w, h, config.qp,
                        recon_residual.data());
    std::int64_t distortion = 0;
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * w + j;
        const std::uint8_t value =
            clamp_pixel(static_cast<std::int32_t>(pred[idx]) +
                        recon_residual[idx]);
        candidate[idx] = value;
        const std::int64_t err =
            static_cast<std::int64_t>(orig.at(block.x + j, block.y + i)) -
            value;
        distortion += err * err;
      }
    }
    const double cost = static_cast<double>(distortion) +
                        lambda * static_cast<double>(tq.bits);
    if (cost < best_cost) {
      best_cost = cost;
      best.mode = mode;
      best.distortion = distortion;
      best.bits = tq.bits;
      best_pixels.swap(candidate);
    }
  }
  if (stats != nullptr) {
    stats->mode_evaluations += kNumIntraModes;
  }
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      recon.at(block.x + j, block.y + i) =
          best_pixels[static_cast<std::size_t>(i) * w + j];
    }
  }
  return best;
}

}  // namespace mevhas
