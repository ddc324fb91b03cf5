/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mevhas/encoder.hpp"
#include "mevhas/intra.hpp"
#include "mevhas/policy.hpp"
#include "mevhas/transform.hpp"
#include "test_util.hpp"

using namespace mevhas;

namespace {

// Straightforward O(N^4) DCT-II, kept deliberately naive.
void naive_dct(const std::vector<double>& in, std::vector<double>& out, int w,
               int h) {
  const double pi = std::acos(-1.0);
  out.assign(in.size(), 0.0);
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      double acc = 0.0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          acc += in[static_cast<std::size_t>(y) * w + x] *
                 std::cos(pi * (2 * y + 1) * u / (2.0 * h)) *
                 std::cos(pi * (2 * x + 1) * v / (2.0 * w));
        }
      }
      const double au = u == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
      const double av = v == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
      out[static_cast<std::size_t>(u) * w + v] = au * av * acc;
    }
  }
}

// Independent re-derivation of the mode loop: same documented prediction
// formulas, argmin of D + lambda * R with the declaration-order tie break.
struct OracleMode {
  IntraMode mode = IntraMode::kDc;
  std::int64_t distortion = 0;
  std::int64_t bits = 0;
  double cost = 0.0;
};

OracleMode oracle_modes(const LumaFrame& orig, const LumaFrame& recon,
                        const CodingBlock& b, const EncoderConfig& cfg) {
  const int w = b.width, h = b.height;
  std::vector<int> top(w), left(h);
  for (int j = 0; j < w; ++j) {
    top[j] = b.y > 0 ? recon.at(b.x + j, b.y - 1) : orig.at(b.x + j, 0);
  }
  for (int i = 0; i < h; ++i) {
    left[i] = b.x > 0 ? recon.at(b.x - 1, b.y + i) : orig.at(0, b.y + i);
  }
  const double lambda = lambda_of_qp(cfg.qp, cfg.lambda_scale);

  OracleMode best;
  double best_cost = 1e300;
  for (int m = 0; m < kNumIntraModes; ++m) {
    std::vector<int> pred(static_cast<std::size_t>(w) * h);
    switch (static_cast<IntraMode>(m)) {
      case IntraMode::kDc: {
        long long sum = 0;
        for (int v : top) sum += v;
        for (int v : left) sum += v;
        const int dc = static_cast<int>((sum + (w + h) / 2) / (w + h));
        for (auto& p : pred) p = dc;
        break;
      }
      case IntraMode::kPlanar: {
        const int lw = static_cast<int>(std::log2(w));
        const int lh = static_cast<int>(std::log2(h));
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) {
            const long long hor =
                static_cast<long long>(w - 1 - j) * left[i] +
                static_cast<long long>(j + 1) * top[w - 1];
            const long long ver =
                static_cast<long long>(h - 1 - i) * top[j] +
                static_cast<long long>(i + 1) * left[h - 1];
            long long val = ((hor << lh) + (ver << lw) +
                             static_cast<long long>(w) * h) >>
                            (lw + lh + 1);
            if (val < 0) val = 0;
            if (val > 255) val = 255;
            pred[static_cast<std::size_t>(i) * w + j] =
                static_cast<int>(val);
          }
        }
        break;
      }
      case IntraMode::kHorizontal:
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) {
            pred[static_cast<std::size_t>(i) * w + j] = left[i];
          }
        }
        break;
      case IntraMode::kVertical:
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < w; ++j) {
            pred[static_cast<std::size_t>(i) * w + j] = top[j];
          }
        }
        break;
    }
    std::vector<std::int16_t> residual(pred.size());
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * w + j;
        residual[idx] = static_cast<std::int16_t>(
            orig.at(b.x + j, b.y + i) - pred[idx]);
      }
    }
    std::vector<std::int16_t> recon_res(pred.size());
    const TransformQuantResult tq =
        transform_quant(residual.data(), w, h, cfg.qp, recon_res.data());
    std::int64_t dist = 0;
    for (int i = 0; i < h; ++i) {
      for (int j = 0; j < w; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * w + j;
        int value = pred[idx] + recon_res[idx];
        if (value < 0) value = 0;
        if (value > 255) value = 255;
        const std::int64_t err = orig.at(b.x + j, b.y + i) - value;
        dist += err * err;
      }
    }
    const double cost =
        static_cast<double>(dist) + lambda * static_cast<double>(tq.bits);
    if (cost < best_cost) {
      best_cost = cost;
      best = OracleMode{static_cast<IntraMode>(m), dist, tq.bits, cost};
    }
  }
  return best;
}

std::int64_t region_sse(const LumaFrame& a, const LumaFrame& b, const CuRect& r) {
  std::int64_t sse = 0;
  for (int y = r.y; y < r.y + r.h; ++y) {
    for (int x = r.x; x < r.x + r.w; ++x) {
      const std::int64_t d = static_cast<std::int64_t>(a.at(x, y)) - b.at(x, y);
      sse += d * d;
    }
  }
  return sse;
}

// Prunes exactly the given block size; everything else evaluates fully.
class PruneSizePolicy : public GatingPolicy {
 public:
  PruneSizePolicy(int w, int h) : w_(w), h_(h) {}
  GateDecision decide(const CodingBlock& b, bool) const override {
    return b.width == w_ && b.height == h_ ? GateDecision::kPrune
                                           : GateDecision::kFullRdo;
  }

 private:
  int w_, h_;
};

}  // namespace

TEST_SUITE("codec-core") {

TEST_CASE("quantizer step closed form") {
  CHECK(qstep_of_qp(4) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(qstep_of_qp(16) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(qstep_of_qp(10) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("lambda model closed form") {
  CHECK(lambda_of_qp(12) == doctest::Approx(0.57).epsilon(1e-12));
  CHECK(lambda_of_qp(15) == doctest::Approx(2 * 0.57).epsilon(1e-12));
  CHECK(lambda_of_qp(32) ==
        doctest::Approx(0.57 * std::exp2(20.0 / 3.0)).epsilon(1e-12));
  CHECK(lambda_of_qp(32, 2.0) == doctest::Approx(2 * lambda_of_qp(32)));
}

TEST_CASE("dct matches the quadruple-loop oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-255.0, 255.0);
  for (const auto [w, h] : {std::pair{8, 8}, {16, 8}, {32, 32}}) {
    std::vector<double> in(static_cast<std::size_t>(w) * h);
    for (auto& v : in) v = dist(rng);
    std::vector<double> fast(in.size()), slow;
    dct_2d(in.data(), fast.data(), w, h);
    naive_dct(in, slow, w, h);
    for (std::size_t i = 0; i < in.size(); ++i) {
      CHECK(fast[i] == doctest::Approx(slow[i]).epsilon(1e-9));
    }
    std::vector<double> back(in.size());
    idct_2d(fast.data(), back.data(), w, h);
    for (std::size_t i = 0; i < in.size(); ++i) {
      CHECK(back[i] == doctest::Approx(in[i]).epsilon(1e-9));
    }
  }
}

TEST_CASE("transform_quant on a zero residual") {
  std::vector<std::int16_t> zero(64, 0);
  const TransformQuantResult tq = transform_quant(zero.data(), 8, 8, 32);
  CHECK(tq.distortion == 0);
  CHECK(tq.bits == 16);
}

TEST_CASE("transform_quant bit cost follows the level formula") {
  // A constant residual concentrates everything in the DC coefficient of
  // magnitude v * sqrt(w * h), so the rate formula is directly checkable.
  for (const int qp : {16, 24, 32}) {
    for (const int v : {1, 3, 9, 40}) {
      std::vector<std::int16_t> residual(64, static_cast<std::int16_t>(v));
      const TransformQuantResult tq =
          transform_quant(residual.data(), 8, 8, qp);
      const double qstep = qstep_of_qp(qp);
      const auto level = static_cast<std::int64_t>(8.0 * v / qstep);
      std::int64_t expected_bits = 16;
      if (level >= 1) {
        expected_bits +=
            3 + 2 * static_cast<std::int64_t>(
                        std::ceil(std::log2(static_cast<double>(level) + 1)));
      }
      CHECK(tq.bits == expected_bits);
    }
  }
}

TEST_CASE("transform_quant honors exact quantization") {
  // qp 16 -> Qstep 4; DC of a constant-20 8x8 block is 160, a multiple of 4.
  std::vector<std::int16_t> residual(64, 20);
  std::vector<std::int16_t> recon(64);
  const TransformQuantResult tq =
      transform_quant(residual.data(), 8, 8, 16, recon.data());
  CHECK(tq.distortion == 0);
  for (const auto r : recon) CHECK(r == 20);
}

TEST_CASE("allowed_splits covers the rule table") {
  EncoderConfig cfg;
  const int big = 1 << 20;  // interior: nothing crosses

  CodingBlock root;
  root.width = root.height = 128;
  SplitSet s = allowed_splits(root, cfg, big, big);
  for (int i = 0; i < kNumSplitTypes; ++i) {
    CHECK(s.contains(static_cast<SplitType>(i)));
  }

  CodingBlock mt_block;
  mt_block.width = 32;
  mt_block.height = 16;
  mt_block.mt_depth = 1;
  mt_block.in_mt_subtree = true;
  s = allowed_splits(mt_block, cfg, big, big);
  CHECK(s.contains(SplitType::kNoSplit));
  CHECK_FALSE(s.contains(SplitType::kQt));      // inside a BT/TT subtree
  CHECK(s.contains(SplitType::kBtHor));
  CHECK(s.contains(SplitType::kBtVer));
  CHECK_FALSE(s.contains(SplitType::kTtHor));   // height 16 < 32
  CHECK(s.contains(SplitType::kTtVer));

  CodingBlock tiny;
  tiny.width = tiny.height = 8;
  s = allowed_splits(tiny, cfg, big, big);
  CHECK(s.contains(SplitType::kNoSplit));
  for (int i = 1; i < kNumSplitTypes; ++i) {
    CHECK_FALSE(s.contains(static_cast<SplitType>(i)));
  }

  // MT depth cap.
  CodingBlock capped = mt_block;
  capped.mt_depth = cfg.max_mt_depth;
  s = allowed_splits(capped, cfg, big, big);
  SplitSet ns_only;
  ns_only.add(SplitType::kNoSplit);
  CHECK(s == ns_only);
}

TEST_CASE("boundary blocks are forced to a single implicit split") {
  EncoderConfig cfg;

  CodingBlock ctu;
  ctu.width = ctu.height = 128;
  SplitSet s = allowed_splits(ctu, cfg, 200, 64);  // crosses right and bottom
  SplitSet qt_only;
  qt_only.add(SplitType::kQt);
  CHECK(s == qt_only);

  CodingBlock strip;
  strip.x = 0;
  strip.y = 0;
  strip.width = 64;
  strip.height = 128;
  strip.mt_depth = cfg.max_mt_depth;  // the cap does not apply to implicit splits
  strip.in_mt_subtree = true;
  s = allowed_splits(strip, cfg, 1024, 100);  // crosses the bottom
  SplitSet bt_h_only;
  bt_h_only.add(SplitType::kBtHor);
  CHECK(s == bt_h_only);

  CodingBlock sliver;
  sliver.x = 96;
  sliver.y = 0;
  sliver.width = 8;
  sliver.height = 8;
  s = allowed_splits(sliver, cfg, 100, 1024);  // crosses right, cannot split
  SplitSet ns_only;
  ns_only.add(SplitType::kNoSplit);
  CHECK(s == ns_only);

  CodingBlock outside;
  outside.x = 128;
  outside.y = 0;
  outside.width = outside.height = 128;
  s = allowed_splits(outside, cfg, 100, 1024);  // fully in the padding
  CHECK(s.contains(SplitType::kNoSplit));
}

TEST_CASE("split geometry tiles the parent") {
  CodingBlock block;
  block.x = 64;
  block.y = 32;
  block.width = 64;
  block.height = 32;

  const ChildList qt = split_children(
      CodingBlock{0, 0, 64, 64, 1, 0, false}, SplitType::kQt);
  REQUIRE(qt.count == 4);
  CHECK(qt.blocks[0].qt_depth == 2);
  CHECK_FALSE(qt.blocks[0].in_mt_subtree);

  const ChildList tt = split_children(block, SplitType::kTtHor);
  REQUIRE(tt.count == 3);
  CHECK(tt.blocks[0].height == 8);
  CHECK(tt.blocks[1].height == 16);  // middle part twice the outer ones
  CHECK(tt.blocks[2].height == 8);
  CHECK(tt.blocks[1].y == 40);
  for (int i = 0; i < 3; ++i) {
    CHECK(tt.blocks[i].in_mt_subtree);
    CHECK(tt.blocks[i].mt_depth == 1);
  }

  const ChildList bt = split_children(block, SplitType::kBtVer);
  REQUIRE(bt.count == 2);
  CHECK(bt.blocks[0].width == 32);
  CHECK(bt.blocks[1].x == 96);
}

TEST_CASE("QT stays prohibited below BT and TT") {
  EncoderConfig cfg;
  const int big = 1 << 20;
  for (const auto split : {SplitType::kBtHor, SplitType::kBtVer,
                           SplitType::kTtHor, SplitType::kTtVer}) {
    CodingBlock parent;
    parent.width = parent.height = 64;
    const ChildList children = split_children(parent, split);
    for (int i = 0; i < children.count; ++i) {
      CHECK(children.blocks[i].in_mt_subtree);
      const SplitSet s = allowed_splits(children.blocks[i], cfg, big, big);
      CHECK_FALSE(s.contains(SplitType::kQt));
    }
  }
}

TEST_CASE("constant block with constant neighbors picks DC at zero cost") {
  const LumaFrame orig = test::constant_frame(32, 32, 77);
  LumaFrame recon = test::constant_frame(32, 32, 77);
  CodingBlock block;
  block.x = 8;
  block.y = 8;
  block.width = block.height = 8;
  EncoderConfig cfg;
  EncodeStats stats;
  const ModeDecision d = evaluate_modes(orig, recon, block, cfg, &stats);
  CHECK(d.mode == IntraMode::kDc);
  CHECK(d.distortion == 0);
  CHECK(d.bits == 16);
  CHECK(stats.mode_evaluations == 4);
}

TEST_CASE("vertical stripes with matching top neighbors pick vertical") {
  LumaFrame orig = test::stripe_frame(32, 32, 1);
  LumaFrame recon = orig;  // the row above the block is already perfect
  CodingBlock block;
  block.x = 8;
  block.y = 8;
  block.width = block.height = 8;
  EncoderConfig cfg;
  cfg.qp = 27;
  const ModeDecision d = evaluate_modes(orig, recon, block, cfg, nullptr);
  CHECK(d.mode == IntraMode::kVertical);
  CHECK(d.distortion == 0);
  CHECK(d.bits == 16);
}

TEST_CASE("evaluate_modes matches the four-mode brute force") {
  std::mt19937_64 rng(123);
  EncoderConfig cfg;
  for (int trial = 0; trial < 60; ++trial) {
    cfg.qp = 12 + static_cast<int>(rng() % 36);
    const LumaFrame orig = test::noise_frame(32, 32, rng());
    LumaFrame recon = test::noise_frame(32, 32, rng());
    CodingBlock block;
    block.x = 8 * static_cast<int>(rng() % 3);
    block.y = 8 * static_cast<int>(rng() % 3);
    block.width = block.height = 8;
    const OracleMode expected = oracle_modes(orig, recon, block, cfg);
    const ModeDecision got = evaluate_modes(orig, recon, block, cfg, nullptr);
    CHECK(got.mode == expected.mode);
    CHECK(got.distortion == expected.distortion);
    CHECK(got.bits == expected.bits);
  }
}

TEST_CASE("a one-CTU config reduces to a single mode evaluation") {
  EncoderConfig cfg;
  cfg.ctu_size = 8;
  cfg.qp = 30;
  const LumaFrame frame = test::noise_frame(8, 8, 9);
  const EncodeResult r = encode_frame(frame, cfg);
  REQUIRE(r.record.cus.size() == 1);
  CHECK(r.stats.mode_evaluations == 4);
  CHECK(r.stats.nodes_visited == 1);

  LumaFrame recon_scratch(8, 8, 0);
  CodingBlock block;
  block.width = block.height = 8;
  const ModeDecision direct =
      evaluate_modes(frame, recon_scratch, block, cfg, nullptr);
  CHECK(r.stats.sse == direct.distortion);
  CHECK(r.stats.total_bits == direct.bits);
  CHECK(r.recon == recon_scratch);
}

TEST_CASE("constant frames stay exact with one CU per CTU") {
  for (const int qp : {12, 27, 32, 37, 42, 51}) {
    for (const int value : {0, 60, 128, 255}) {
      EncoderConfig cfg;
      cfg.qp = qp;
      const LumaFrame frame =
          test::constant_frame(256, 128, static_cast<std::uint8_t>(value));
      const EncodeResult r = encode_frame(frame, cfg);
      REQUIRE(r.record.cus.size() == 2);
      for (const CuRect& cu : r.record.cus) {
        CHECK(cu.w == 128);
        CHECK(cu.h == 128);
      }
      CHECK(r.stats.sse == 0);
      CHECK(r.recon == frame);
    }
  }
}

TEST_CASE("encode is deterministic apart from wall time") {
  const LumaFrame frame = test::mixed_frame(256, 128, 21);
  EncoderConfig cfg;
  cfg.qp = 32;
  const EncodeResult a = encode_frame(frame, cfg);
  const EncodeResult b = encode_frame(frame, cfg);
  CHECK(a.recon == b.recon);
  CHECK(a.record == b.record);
  CHECK(a.stats.total_bits == b.stats.total_bits);
  CHECK(a.stats.sse == b.stats.sse);
  CHECK(a.stats.mode_evaluations == b.stats.mode_evaluations);
  CHECK(a.stats.nodes_visited == b.stats.nodes_visited);
}

TEST_CASE("records tile the padded frame, including boundary frames") {
  EncoderConfig cfg;
  cfg.qp = 37;
  for (const auto [w, h] : {std::pair{128, 128}, {200, 120}, {150, 74}}) {
    const LumaFrame frame = test::mixed_frame(w, h, 13);
    const EncodeResult r = encode_frame(frame, cfg);
    CHECK(r.record.frame_width == (w + 127) / 128 * 128);
    CHECK(r.record.frame_height == (h + 127) / 128 * 128);
    CHECK(is_tiling(r.record));
  }
}

TEST_CASE("frame sse decomposes over the recorded CUs") {
  const LumaFrame frame = test::noise_frame(256, 128, 31);
  EncoderConfig cfg;
  cfg.qp = 32;
  const EncodeResult r = encode_frame(frame, cfg);
  const LumaFrame padded = pad_replicate(frame, cfg.ctu_size);
  const LumaFrame padded_recon = pad_replicate(r.recon, cfg.ctu_size);
  // 256x128 pads to itself, so recon covers the full recorded area.
  std::int64_t total = 0;
  for (const CuRect& cu : r.record.cus) {
    total += region_sse(padded, padded_recon, cu);
  }
  CHECK(total == r.stats.sse);
}

TEST_CASE("bits decrease as qp increases on the corpus frames") {
  EncoderConfig cfg;
  std::vector<LumaFrame> corpus;
  corpus.push_back(test::gradient_frame(128, 128));
  corpus.push_back(test::make_clip(128, 128, 1, "checker").frames[0]);
  corpus.push_back(test::mixed_frame(128, 128, 3));
  for (const LumaFrame& frame : corpus) {
    std::int64_t previous = -1;
    for (const int qp : {17, 22, 27, 32, 37, 42, 47}) {
      cfg.qp = qp;
      const EncodeResult r = encode_frame(frame, cfg);
      if (previous >= 0) CHECK(r.stats.total_bits <= previous);
      previous = r.stats.total_bits;
    }
  }
}

TEST_CASE("no policy equals an always-FullRdo policy") {
  const LumaFrame frame = test::mixed_frame(128, 128, 8);
  EncoderConfig cfg;
  cfg.qp = 32;
  const EncodeResult off = encode_frame(frame, cfg, nullptr);
  const FixedDecisionPolicy full(GateDecision::kFullRdo);
  const EncodeResult forced = encode_frame(frame, cfg, &full);
  CHECK(off.record == forced.record);
  CHECK(off.stats.total_bits == forced.stats.total_bits);
  CHECK(off.stats.sse == forced.stats.sse);
  CHECK(off.stats.mode_evaluations == forced.stats.mode_evaluations);
  CHECK(off.recon == forced.recon);
}

TEST_CASE("policy map must cover the padded frame") {
  const LumaFrame frame = test::mixed_frame(256, 128, 8);
  EncoderConfig cfg;
  PartitionMap map;
  map.frame_width = 128;
  map.frame_height = 128;
  map.cells.assign(16 * 16, CuSize{128, 128});
  const MapGatingPolicy policy(map);
  CHECK_THROWS_WITH_AS(encode_frame(frame, cfg, &policy),
                       doctest::Contains("256x128"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(encode_frame(frame, cfg, &policy),
                       doctest::Contains("128x128"), std::invalid_argument);
}

TEST_CASE("a pruned size disappears from the record") {
  const LumaFrame frame = test::noise_frame(128, 128, 17);
  EncoderConfig cfg;
  cfg.qp = 22;  // noise at low qp would otherwise split to 64x64 and below
  const PruneSizePolicy prune_64(64, 64);
  const EncodeResult r = encode_frame(frame, cfg, &prune_64);
  CHECK(is_tiling(r.record));
  for (const CuRect& cu : r.record.cus) {
    CHECK(!(cu.w == 64 && cu.h == 64));
  }
}

TEST_CASE("an all-prune policy falls back to the full search") {
  const LumaFrame frame = test::mixed_frame(128, 128, 5);
  EncoderConfig cfg;
  cfg.qp = 32;
  const FixedDecisionPolicy prune(GateDecision::kPrune);
  const EncodeResult gated = encode_frame(frame, cfg, &prune);
  const EncodeResult plain = encode_frame(frame, cfg, nullptr);
  CHECK(gated.stats.gate_fallbacks > 0);
  CHECK(gated.record == plain.record);
  CHECK(gated.stats.total_bits == plain.stats.total_bits);
  CHECK(gated.stats.sse == plain.stats.sse);
}

TEST_CASE("odd frame dimensions are rejected") {
  const LumaFrame frame(33, 32, 0);
  EncoderConfig cfg;
  CHECK_THROWS_AS(encode_frame(frame, cfg), std::invalid_argument);
}

TEST_CASE("stats serialize to one JSON object") {
  EncodeStats stats;
  stats.mode_evaluations = 12;
  stats.total_bits = 345;
  std::ostringstream out;
  write_stats_json(out, stats);
  CHECK(out.str().find("\"mode_evaluations\":12") != std::string::npos);
  CHECK(out.str().find("\"total_bits\":345") != std::string::npos);
}

TEST_CASE("record serializes as JSON lines") {
  PartitionRecord record;
  record.frame_width = record.frame_height = 128;
  record.cus = {CuRect{0, 0, 128, 128}};
  std::ostringstream out;
  write_record_jsonl(out, record, 3);
  CHECK(out.str() ==
        "{\"frame\":3,\"x\":0,\"y\":0,\"w\":128,\"h\":128}\n");
}

}  // TEST_SUITE
