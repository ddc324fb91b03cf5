/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/encoder.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mevhas/intra.hpp"
#include "mevhas/transform.hpp"

namespace mevhas {

namespace {

constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

struct NodeResult {
  double cost = kInfiniteCost;
  std::int64_t distortion = 0;
  std::int64_t bits = 0;
  std::vector<CuRect> cus;

  bool finite() const { return cost != kInfiniteCost; }
};

class FrameEncoder {
 public:
  FrameEncoder(const LumaFrame& frame, const EncoderConfig& config,
               const GatingPolicy* policy)
      : config_(config),
        policy_(policy),
        orig_width_(frame.width),
        orig_height_(frame.height),
        orig_(pad_replicate(frame, config.ctu_size)),
        recon_(orig_.width, orig_.height, 0) {}

  EncodeResult run() {
    if (policy_ != nullptr) {
      policy_->validate_frame(orig_.width, orig_.height);
    }
    EncodeResult result;
    result.record.frame_width = orig_.width;
    result.record.frame_height = orig_.height;
    for (int cy = 0; cy < orig_.height; cy += config_.ctu_size) {
      for (int cx = 0; cx < orig_.width; cx += config_.ctu_size) {
        CodingBlock ctu;
        ctu.x = cx;
        ctu.y = cy;
        ctu.width = config_.ctu_size;
        ctu.height = config_.ctu_size;
        NodeResult best =
            rdo_node(ctu, /*depth=*/0, /*gated=*/policy_ != nullptr);
        if (!best.finite()) {
          // The policy pruned the CTU root itself.
          ++stats_.gate_fallbacks;
          best = rdo_node(ctu, /*depth=*/0, /*gated=*/false);
        }
        stats_.total_bits += best.bits;
        stats_.sse += best.distortion;
        result.record.cus.insert(result.record.cus.end(), best.cus.begin(),
                                 best.cus.end());
      }
    }
    result.stats = stats_;
    result.recon = crop_recon();
    return result;
  }

 private:
  NodeResult rdo_node(const CodingBlock& block, int depth, bool gated) {
    ++stats_.nodes_visited;
    const SplitSet splits =
        allowed_splits(block, config_, orig_width_, orig_height_);
    const bool qt_restricted = !splits.contains(SplitType::kQt);

    GateDecision decision = GateDecision::kFullRdo;
    if (gated) {
      decision = policy_->decide(block, qt_restricted);
    }
    if (decision == GateDecision::kPrune) {
      return NodeResult{};
    }

    ensure_depth(depth);
    std::vector<std::uint8_t>& entry_state = entry_pool_[depth];
    std::vector<std::uint8_t>& best_state = best_pool_[depth];
    save_region(block, entry_state);

    NodeResult best;
    const bool try_ns = splits.contains(SplitType::kNoSplit) &&
                        decision != GateDecision::kSkipModesAllowSplit;
    if (try_ns) {
      const ModeDecision mode =
          evaluate_modes(orig_, recon_, block, config_, &stats_);
      best.cost = static_cast<double>(mode.distortion) +
                  lambda_ * static_cast<double>(mode.bits);
      best.distortion = mode.distortion;
      best.bits = mode.bits;
      best.cus = {CuRect{block.x, block.y, block.width, block.height}};
      save_region(block, best_state);
      restore_region(block, entry_state);
    }

    for (int s = 1; s < kNumSplitTypes; ++s) {
      const auto split = static_cast<SplitType>(s);
      if (!splits.contains(split)) continue;
      NodeResult candidate = try_split(block, split, depth, gated);
      if (candidate.finite() && candidate.cost < best.cost) {
        best = std::move(candidate);
        save_region(block, best_state);
      }
      restore_region(block, entry_state);
    }

    if (!best.finite()) {
      if (!gated) {
        throw std::logic_error("ungated search returned no candidate");
      }
      // Gating eliminated every candidate here; redo the subtree without it
      // so a complete tiling always exists.
      ++stats_.gate_fallbacks;
      return rdo_node(block, depth, /*gated=*/false);
    }

    restore_region(block, best_state);
    return best;
  }

  NodeResult try_split(const CodingBlock& block, SplitType split, int depth,
                       bool gated) {
    const ChildList children = split_children(block, split);
    NodeResult combined;
    combined.cost = 0.0;
    for (int i = 0; i < children.count; ++i) {
      NodeResult child = rdo_node(children.blocks[i], depth + 1, gated);
      if (!child.finite()) {
        return NodeResult{};
      }
      combined.cost += child.cost;
      combined.distortion += child.distortion;
      combined.bits += child.bits;
      combined.cus.insert(combined.cus.end(), child.cus.begin(),
                          child.cus.end());
    }
    return combined;
  }

  void ensure_depth(int depth) {
    while (static_cast<int>(entry_pool_.size()) <= depth) {
      entry_pool_.emplace_back();
      best_pool_.emplace_back();
    }
  }

  void save_region(const CodingBlock& block, std::vector<std::uint8_t>& buf) {
    buf.resize(static_cast<std::size_t>(block.width) * block.height);
    for (int i = 0; i < block.height; ++i) {
      const std::uint8_t* src = recon_.samples.data() +
                                static_cast<std::size_t>(block.y + i) *
                                    recon_.width +
                                block.x;
      std::uint8_t* dst = buf.data() + static_cast<std::size_t>(i) * block.width;
      std::copy(src, src + block.width, dst);
    }
  }

  void restore_region(const CodingBlock& block,
                      const std::vector<std::uint8_t>& buf) {
    for (int i = 0; i < block.height; ++i) {
      const std::uint8_t* src =
          buf.data() + static_cast<std::size_t>(i) * block.width;
      std::uint8_t* dst = recon_.samples.data() +
                          static_cast<std::size_t>(block.y + i) *
                              recon_.width +
                          block.x;
      std::copy(src, src + block.width, dst);
    }
  }

  LumaFrame crop_recon() const {
    if (orig_width_ == recon_.width && orig_height_ == recon_.height) {
      return recon_;
    }
    LumaFrame out(orig_width_, orig_height_);
    for (int y = 0; y < orig_height_; ++y) {
      for (int x = 0; x < orig_width_; ++x) {
        out.at(x, y) = recon_.at(x, y);
      }
    }
    return out;
  }

  const EncoderConfig& config_;
  const GatingPolicy* policy_;
  int orig_width_;
  int orig_height_;
  LumaFrame orig_;
  LumaFrame recon_;
  double lambda_ = lambda_of_qp(config_.qp, config_.lambda_scale);
  EncodeStats stats_;
  // Deques keep the per-depth buffers stable while deeper calls grow them.
  std::deque<std::vector<std::uint8_t>> entry_pool_;
  std::deque<std::vector<std::uint8_t>> best_pool_;
};

}  // namespace

EncodeResult encode_frame(const LumaFrame& frame, const EncoderConfig& config,
                          const GatingPolicy* policy) {
  config.validate();
  if (frame.width < 8 || frame.height < 8) {
    std::ostringstream msg;
    msg << "frame " << frame.width << "x" << frame.height
        << " is below the 8x8 minimum";
    throw std::invalid_argument(msg.str());
  }
  if (frame.width % 2 != 0 || frame.height % 2 != 0) {
    std::ostringstream msg;
    msg << "frame dimensions must be even, got " << frame.width << "x"
        << frame.height;
    throw std::invalid_argument(msg.str());
  }
  const auto start = std::chrono::steady_clock::now();
  FrameEncoder encoder(frame, config, policy);
  EncodeResult result = encoder.run();
  result.stats.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

void write_stats_json(std::ostream& out, const EncodeStats& stats) {
  out << "{\"mode_evaluations\":" << stats.mode_evaluations
      << ",\"nodes_visited\":" << stats.nodes_visited
      << ",\"total_bits\":" << stats.total_bits << ",\"sse\":" << stats.sse
      << ",\"gate_fallbacks\":" << stats.gate_fallbacks
      << ",\"wall_time\":" << stats.wall_time << "}\n";
}

}  // namespace mevhas
