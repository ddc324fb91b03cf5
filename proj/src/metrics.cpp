/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "mevhas/transform.hpp"

namespace mevhas {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("metrics: " + what);
}

// Cubic polynomial in (quality - center), coefficients low to high.
struct CubicFit {
  double center = 0.0;
  std::array<double, 4> coeff{};

  double integral(double lo, double hi) const {
    auto antiderivative = [this](double q) {
      const double u = q - center;
      double acc = 0.0;
      double power = u;
      for (int k = 0; k < 4; ++k) {
        acc += coeff[k] * power / (k + 1);
        power *= u;
      }
      return acc;
    };
    return antiderivative(hi) - antiderivative(lo);
  }
};

// Exact interpolation of four (quality, value) pairs, centered for
// conditioning; solved by Gaussian elimination with partial pivoting.
CubicFit fit_cubic(const std::vector<RdCurvePoint>& points,
                   const std::vector<double>& values) {
  CubicFit fit;
  for (const auto& p : points) fit.center += p.quality;
  fit.center /= static_cast<double>(points.size());

  std::array<std::array<double, 5>, 4> m{};
  for (int r = 0; r < 4; ++r) {
    const double u = points[r].quality - fit.center;
    double power = 1.0;
    for (int c = 0; c < 4; ++c) {
      m[r][c] = power;
      power *= u;
    }
    m[r][4] = values[r];
  }
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (std::abs(m[pivot][col]) < 1e-12) fail("degenerate curve fit");
    std::swap(m[col], m[pivot]);
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c <= 4; ++c) m[r][c] -= f * m[col][c];
    }
  }
  for (int k = 0; k < 4; ++k) fit.coeff[k] = m[k][4] / m[k][k];
  return fit;
}

void sort_by_quality(std::vector<RdCurvePoint>& curve) {
  std::sort(curve.begin(), curve.end(),
            [](const RdCurvePoint& a, const RdCurvePoint& b) {
              return a.quality < b.quality;
            });
}

bool identical_curves(const std::vector<RdCurvePoint>& a,
                      const std::vector<RdCurvePoint>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rate != b[i].rate || a[i].quality != b[i].quality) return false;
  }
  return true;
}

void validate_curve(const std::vector<RdCurvePoint>& curve,
                    bool monotone_rate, const char* label) {
  if (curve.size() != 4) {
    std::ostringstream msg;
    msg << label << " curve has " << curve.size() << " points, expected 4";
    fail(msg.str());
  }
  for (const auto& p : curve) {
    if (!(p.rate > 0.0)) {
      std::ostringstream msg;
      msg << label << " curve has non-positive rate " << p.rate;
      fail(msg.str());
    }
  }
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (!(curve[i].quality > curve[i - 1].quality)) {
      std::ostringstream msg;
      msg << label << " curve quality is not strictly increasing";
      fail(msg.str());
    }
    if (monotone_rate && !(curve[i].rate > curve[i - 1].rate)) {
      std::ostringstream msg;
      msg << label << " curve rate is not strictly increasing";
      fail(msg.str());
    }
  }
}

// Average difference of the fitted log10 curves over the shared quality
// interval. Measured wall times need not grow monotonically with quality,
// so rate monotonicity is only enforced for bitrate curves.
double average_log_delta(std::vector<RdCurvePoint> anchor,
                         std::vector<RdCurvePoint> test, bool monotone_rate) {
  sort_by_quality(anchor);
  sort_by_quality(test);
  if (identical_curves(anchor, test)) return 0.0;
  validate_curve(anchor, monotone_rate, "anchor");
  validate_curve(test, monotone_rate, "test");

  const double lo = std::max(anchor.front().quality, test.front().quality);
  const double hi = std::min(anchor.back().quality, test.back().quality);
  if (!(hi > lo)) fail("curves share no quality overlap");

  auto log_values = [](const std::vector<RdCurvePoint>& c) {
    std::vector<double> v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) v[i] = std::log10(c[i].rate);
    return v;
  };
  const CubicFit fa = fit_cubic(anchor, log_values(anchor));
  const CubicFit ft = fit_cubic(test, log_values(test));
  return (ft.integral(lo, hi) - fa.integral(lo, hi)) / (hi - lo);
}

}  // namespace

double psnr_frames(const std::vector<LumaFrame>& reference,
                   const std::vector<LumaFrame>& distorted) {
  if (reference.size() != distorted.size() || reference.empty()) {
    fail("sequences differ in frame count or are empty");
  }
  std::uint64_t sse = 0;
  std::uint64_t count = 0;
  for (std::size_t f = 0; f < reference.size(); ++f) {
    const LumaFrame& a = reference[f];
    const LumaFrame& b = distorted[f];
    if (a.width != b.width || a.height != b.height) {
      std::ostringstream msg;
      msg << "frame " << f << " dimensions differ: " << a.width << "x"
          << a.height << " vs " << b.width << "x" << b.height;
      fail(msg.str());
    }
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
      const std::int64_t err =
          static_cast<std::int64_t>(a.samples[i]) - b.samples[i];
      sse += static_cast<std::uint64_t>(err * err);
    }
    count += a.samples.size();
  }
  if (sse == 0) return kLosslessPsnrDb;
  const double mse = static_cast<double>(sse) / static_cast<double>(count);
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double psnr(const VideoSequence& reference, const VideoSequence& distorted) {
  return psnr_frames(reference.frames, distorted.frames);
}

double bd_rate(std::vector<RdCurvePoint> anchor,
               std::vector<RdCurvePoint> test) {
  const double delta =
      average_log_delta(std::move(anchor), std::move(test), true);
  return (std::pow(10.0, delta) - 1.0) * 100.0;
}

double bd_time(std::vector<RdCurvePoint> anchor,
               std::vector<RdCurvePoint> test) {
  const double delta =
      average_log_delta(std::move(anchor), std::move(test), false);
  return -(std::pow(10.0, delta) - 1.0) * 100.0;
}

double efficiency_ratio(double bdbr, double bdt) {
  if (bdt == 0.0) {
    fail("BDBR/BDT is undefined for BDT of zero");
  }
  return bdbr / bdt;
}

ComplexityFeatures complexity_features(const VideoSequence& sequence) {
  if (sequence.frames.empty()) fail("sequence has no frames");
  constexpr int kBlock = 32;
  constexpr double kWeightNorm = 2.0 * (kBlock - 1);

  std::vector<double> energies;
  energies.reserve(sequence.frames.size());
  std::vector<double> pixels(kBlock * kBlock);
  std::vector<double> coeffs(kBlock * kBlock);
  for (const LumaFrame& raw : sequence.frames) {
    const LumaFrame frame = pad_replicate(raw, kBlock);
    double frame_sum = 0.0;
    int blocks = 0;
    for (int by = 0; by < frame.height; by += kBlock) {
      for (int bx = 0; bx < frame.width; bx += kBlock) {
        bool uniform = true;
        const std::uint8_t first = frame.at(bx, by);
        for (int i = 0; i < kBlock; ++i) {
          for (int j = 0; j < kBlock; ++j) {
            const std::uint8_t v = frame.at(bx + j, by + i);
            uniform = uniform && v == first;
            pixels[static_cast<std::size_t>(i) * kBlock + j] = v;
          }
        }
        if (uniform) {
          // No AC energy by definition; skip the transform noise.
          ++blocks;
          continue;
        }
        dct_2d(pixels.data(), coeffs.data(), kBlock, kBlock);
        double acc = 0.0;
        for (int i = 0; i < kBlock; ++i) {
          for (int j = 0; j < kBlock; ++j) {
            if (i == 0 && j == 0) continue;
            const double weight = (i + j) / kWeightNorm;
            acc += weight *
                   std::abs(coeffs[static_cast<std::size_t>(i) * kBlock + j]);
          }
        }
        frame_sum += acc / (kBlock * kBlock - 1);
        ++blocks;
      }
    }
    energies.push_back(frame_sum / blocks);
  }

  ComplexityFeatures features;
  for (const double e : energies) features.E += e;
  features.E /= static_cast<double>(energies.size());
  if (energies.size() > 1) {
    double acc = 0.0;
    for (std::size_t f = 1; f < energies.size(); ++f) {
      acc += std::abs(energies[f] - energies[f - 1]);
    }
    features.h = acc / static_cast<double>(energies.size() - 1);
  }
  return features;
}

std::vector<RdCurvePoint> read_curve_csv(std::istream& in) {
  auto trim = [](std::string s) {
    const auto begin = s.find_first_not_of(" \t\r");
    const auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos) return std::string{};
    return s.substr(begin, end - begin + 1);
  };
  std::vector<RdCurvePoint> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      std::ostringstream msg;
      msg << "line " << line_no << " is not 'rate,psnr'";
      fail(msg.str());
    }
    try {
      std::size_t pos = 0;
      RdCurvePoint p;
      const std::string rate_text = trim(line.substr(0, comma));
      const std::string quality_text = trim(line.substr(comma + 1));
      p.rate = std::stod(rate_text, &pos);
      if (pos != rate_text.size()) throw std::invalid_argument(rate_text);
      p.quality = std::stod(quality_text, &pos);
      if (pos != quality_text.size()) {
        throw std::invalid_argument(quality_text);
      }
      points.push_back(p);
    } catch (const std::exception&) {
      std::ostringstream msg;
      msg << "line " << line_no << " is not 'rate,psnr'";
      fail(msg.str());
    }
  }
  return points;
}

}  // namespace mevhas
