/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_METRICS_HPP_
#define MEVHAS_METRICS_HPP_

#include <iosfwd>
#include <vector>

#include "mevhas/frame.hpp"

namespace mevhas {

// Distinguished value reported for identical inputs (MSE of zero).
inline constexpr double kLosslessPsnrDb = 100.0;

// Luma PSNR over all samples of all frames: 10 * log10(255^2 / MSE).
double psnr(const VideoSequence& reference, const VideoSequence& distorted);
double psnr_frames(const std::vector<LumaFrame>& reference,
                   const std::vector<LumaFrame>& distorted);

// One point of a rate-distortion (or time-distortion) curve.
struct RdCurvePoint {
  double rate = 0.0;     // bits per second, or seconds for time curves
  double quality = 0.0;  // PSNR in dB
};

// Classic Bjontegaard delta bitrate in percent: cubic fit of log10(rate)
// over quality per curve, averaged difference over the overlapping quality
// interval, mapped through 10^delta - 1. Positive means the test curve
// spends more bits. Exactly four points per curve.
double bd_rate(std::vector<RdCurvePoint> anchor,
               std::vector<RdCurvePoint> test);

// Same machinery on log10(seconds), reported as time saved: positive when
// the test curve is faster at equal quality.
double bd_time(std::vector<RdCurvePoint> anchor,
               std::vector<RdCurvePoint> test);

// BDBR / BDT; lower is better. Throws when bdt is zero.
double efficiency_ratio(double bdbr, double bdt);

struct ComplexityFeatures {
  double E = 0.0;  // mean spatial texture energy per frame
  double h = 0.0;  // mean absolute frame-to-frame energy difference
};

// DCT-energy features over 32x32 tiles (frames edge-padded to multiples of
// 32): per block the mean |coefficient| of the non-DC positions weighted by
// (i + j) / 62, averaged over blocks and frames.
ComplexityFeatures complexity_features(const VideoSequence& sequence);

// CSV rows of "rate_or_time,psnr"; blank lines ignored.
std::vector<RdCurvePoint> read_curve_csv(std::istream& in);

}  // namespace mevhas

#endif  // MEVHAS_METRICS_HPP_
