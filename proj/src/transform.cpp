/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mevhas {

namespace {

constexpr int kMinSize = 8;
constexpr int kMaxSize = 128;
constexpr double kPi = 3.14159265358979323846;

bool legal_size(int n) {
  return n >= kMinSize && n <= kMaxSize &&
         std::has_single_bit(static_cast<unsigned>(n));
}

// Orthonormal DCT-II basis. `fwd` row k holds the k-th frequency vector,
// `inv` is its transpose.
struct Basis {
  int n = 0;
  std::vector<double> fwd;
  std::vector<double> inv;

  explicit Basis(int size)
      : n(size),
        fwd(static_cast<std::size_t>(size) * size),
        inv(static_cast<std::size_t>(size) * size) {
    const double a0 = std::sqrt(1.0 / size);
    const double ak = std::sqrt(2.0 / size);
    for (int k = 0; k < size; ++k) {
      for (int i = 0; i < size; ++i) {
        const double w =
            (k == 0 ? a0 : ak) * std::cos(kPi * (2 * i + 1) * k / (2.0 * size));
        fwd[static_cast<std::size_t>(k) * size + i] = w;
        inv[static_cast<std::size_t>(i) * size + k] = w;
      }
    }
  }
};

const Basis& basis_for(int n) {
  static const Basis b8(8);
  static const Basis b16(16);
  static const Basis b32(32);
  static const Basis b64(64);
  static const Basis b128(128);
  switch (n) {
    case 8:
      return b8;
    case 16:
      return b16;
    case 32:
      return b32;
    case 64:
      return b64;
    case 128:
      return b128;
    default: {
      std::ostringstream msg;
      msg << "unsupported transform size " << n;
      throw std::invalid_argument(msg.str());
    }
  }
}

// out[k][x] = sum_y M[k][y] * in[y][x]; M is n x n, in/out are n x width.
// Four output rows per pass so every source row is streamed once per four
// accumulations; per-row summation order matches the scalar loop.
void apply_left(const double* __restrict m, int n, const double* __restrict in,
                double* __restrict out, int width) {
  for (int k = 0; k < n; k += 4) {
    double* __restrict d0 = out + static_cast<std::size_t>(k) * width;
    double* __restrict d1 = d0 + width;
    double* __restrict d2 = d1 + width;
    double* __restrict d3 = d2 + width;
    std::fill(d0, d0 + 4 * static_cast<std::size_t>(width), 0.0);
    const double* m0 = m + static_cast<std::size_t>(k) * n;
    const double* m1 = m0 + n;
    const double* m2 = m1 + n;
    const double* m3 = m2 + n;
    for (int y = 0; y < n; ++y) {
      const double w0 = m0[y], w1 = m1[y], w2 = m2[y], w3 = m3[y];
      const double* __restrict src = in + static_cast<std::size_t>(y) * width;
      for (int x = 0; x < width; ++x) {
        const double s = src[x];
        d0[x] += w0 * s;
        d1[x] += w1 * s;
        d2[x] += w2 * s;
        d3[x] += w3 * s;
      }
    }
  }
}

// out[y][k] = sum_x in[y][x] * MT[x][k]; MT is n x n, in/out are height x n.
// Accumulating over x keeps the inner loop lane-independent; the adds stay
// in ascending-x order, so results equal the scalar loop exactly.
void apply_right(const double* __restrict mt, int n,
                 const double* __restrict in, double* __restrict out,
                 int height) {
  for (int y = 0; y < height; ++y) {
    const double* __restrict src = in + static_cast<std::size_t>(y) * n;
    double* __restrict dst = out + static_cast<std::size_t>(y) * n;
    std::fill(dst, dst + n, 0.0);
    for (int x = 0; x < n; x += 4) {
      const double v0 = src[x], v1 = src[x + 1], v2 = src[x + 2],
                   v3 = src[x + 3];
      const double* w0 = mt + static_cast<std::size_t>(x) * n;
      const double* w1 = w0 + n;
      const double* w2 = w1 + n;
      const double* w3 = w2 + n;
      for (int k = 0; k < n; ++k) {
        double acc = dst[k];
        acc += v0 * w0[k];
        acc += v1 * w1[k];
        acc += v2 * w2[k];
        acc += v3 * w3[k];
        dst[k] = acc;
      }
    }
  }
}

void check_size(int width, int height) {
  if (!legal_size(width) || !legal_size(height)) {
    std::ostringstream msg;
    msg << "transform size " << width << "x" << height
        << " outside the supported {8,16,32,64,128} set";
    throw std::invalid_argument(msg.str());
  }
}

void check_qp(int qp) {
  if (qp < 0 || qp > 51) {
    std::ostringstream msg;
    msg << "qp " << qp << " outside [0, 51]";
    throw std::invalid_argument(msg.str());
  }
}

std::vector<double>& scratch(int slot, std::size_t count) {
  thread_local std::vector<double> buffers[3];
  if (buffers[slot].size() < count) buffers[slot].resize(count);
  return buffers[slot];
}

}  // namespace

double qstep_of_qp(int qp) {
  check_qp(qp);
  return std::exp2((qp - 4) / 6.0);
}

double lambda_of_qp(int qp, double scale) {
  check_qp(qp);
  return scale * 0.57 * std::exp2((qp - 12) / 3.0);
}

void dct_2d(const double* in, double* out, int width, int height) {
  check_size(width, height);
  const Basis& bh = basis_for(height);
  const Basis& bw = basis_for(width);
  std::vector<double>& tmp =
      scratch(0, static_cast<std::size_t>(width) * height);
  apply_left(bh.fwd.data(), height, in, tmp.data(), width);
  apply_right(bw.inv.data(), width, tmp.data(), out, height);  // inv = fwd^T
}

void idct_2d(const double* in, double* out, int width, int height) {
  check_size(width, height);
  const Basis& bh = basis_for(height);
  const Basis& bw = basis_for(width);
  std::vector<double>& tmp =
      scratch(0, static_cast<std::size_t>(width) * height);
  apply_left(bh.inv.data(), height, in, tmp.data(), width);
  apply_right(bw.fwd.data(), width, tmp.data(), out, height);  // fwd = inv^T
}

TransformQuantResult transform_quant(const std::int16_t* residual, int width,
                                     int height, int qp,
                                     std::int16_t* recon_out) {
  check_size(width, height);
  const double qstep = qstep_of_qp(qp);
  const std::size_t count = static_cast<std::size_t>(width) * height;

  TransformQuantResult result;
  result.bits = 16;

  std::vector<double>& block = scratch(1, count);
  std::int64_t input_sse = 0;
  std::int16_t lo = residual[0], hi = residual[0];
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t r = residual[i];
    block[i] = static_cast<double>(r);
    input_sse += r * r;
    lo = std::min(lo, residual[i]);
    hi = std::max(hi, residual[i]);
  }
  if (lo == 0 && hi == 0) {
    if (recon_out != nullptr) std::fill(recon_out, recon_out + count, 0);
    return result;
  }

  struct Nonzero {
    int u, v;
    double value;
  };
  thread_local std::vector<Nonzero> nonzeros;
  nonzeros.clear();
  std::vector<double>& coeffs = scratch(2, count);

  if (lo == hi) {
    // A constant residual transforms to a lone DC coefficient.
    const double dc =
        static_cast<double>(lo) * std::sqrt(static_cast<double>(count));
    const auto level = static_cast<std::int64_t>(dc / qstep);
    if (level != 0) {
      const auto magnitude =
          static_cast<std::uint64_t>(level < 0 ? -level : level);
      result.bits += 3 + 2 * std::bit_width(magnitude);
      nonzeros.push_back(Nonzero{0, 0, static_cast<double>(level) * qstep});
    }
  } else {
    dct_2d(block.data(), coeffs.data(), width, height);

    // Dead-zone quantization: truncation toward zero widens the zero bin
    // to (-Qstep, Qstep).
    for (std::size_t i = 0; i < count; ++i) {
      const auto level =
          static_cast<std::int64_t>(coeffs[i] / qstep);  // trunc
      coeffs[i] = static_cast<double>(level) * qstep;
      if (level != 0) {
        const auto magnitude =
            static_cast<std::uint64_t>(level < 0 ? -level : level);
        result.bits += 3 + 2 * std::bit_width(magnitude);
        nonzeros.push_back(Nonzero{static_cast<int>(i) / width,
                                   static_cast<int>(i) % width, coeffs[i]});
      }
    }
  }
  if (nonzeros.empty()) {
    // Everything fell into the dead zone: the reconstruction is zero.
    result.distortion = input_sse;
    if (recon_out != nullptr) std::fill(recon_out, recon_out + count, 0);
    return result;
  }

  std::vector<double>& recon = scratch(1, count);
  if (static_cast<int>(nonzeros.size()) <= (width + height) / 2) {
    // Few surviving coefficients: accumulate their basis outer products
    // instead of running the dense inverse.
    std::fill(recon.begin(), recon.begin() + count, 0.0);
    const Basis& bh = basis_for(height);
    const Basis& bw = basis_for(width);
    for (const Nonzero& nz : nonzeros) {
      const double* column = bh.fwd.data() + static_cast<std::size_t>(nz.u) * height;
      const double* row = bw.fwd.data() + static_cast<std::size_t>(nz.v) * width;
      for (int y = 0; y < height; ++y) {
        const double f = nz.value * column[y];
        double* dst = recon.data() + static_cast<std::size_t>(y) * width;
        for (int x = 0; x < width; ++x) {
          dst[x] += f * row[x];
        }
      }
    }
  } else {
    idct_2d(coeffs.data(), recon.data(), width, height);
  }

  for (std::size_t i = 0; i < count; ++i) {
    auto value = static_cast<std::int64_t>(std::llround(recon[i]));
    if (value < -255) value = -255;
    if (value > 255) value = 255;
    const std::int64_t err = residual[i] - value;
    result.distortion += err * err;
    if (recon_out != nullptr) {
      recon_out[i] = static_cast<std::int16_t>(value);
    }
  }
  return result;
}

}  // namespace mevhas
