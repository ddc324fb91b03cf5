/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_TRANSFORM_HPP_
#define MEVHAS_TRANSFORM_HPP_

#include <cstdint>

namespace mevhas {

// Quantization step: Qstep(4) = 1.0, doubling every 6 QP.
double qstep_of_qp(int qp);

// RDO lambda: scale * 0.57 * 2^((qp - 12) / 3).
double lambda_of_qp(int qp, double scale = 1.0);

struct TransformQuantResult {
  std::int64_t distortion = 0;  // SSE between residual and its reconstruction
  std::int64_t bits = 0;        // block header proxy plus per-level cost
};

// Transform-quantize-reconstruct round trip for one residual block.
//
// The residual (row-major, values in [-255, 255], dimensions in {8..128})
// goes through an orthonormal 2-D DCT-II, dead-zone quantization at
// Qstep(qp), dequantization and the inverse transform; the reconstruction is
// rounded to integers and clamped to [-255, 255]. The rate proxy is
// 16 + sum over nonzero levels of (3 + 2 * bit_width(|level|)).
// When recon_out is non-null it receives the reconstructed residual.
TransformQuantResult transform_quant(const std::int16_t* residual, int width,
                                     int height, int qp,
                                     std::int16_t* recon_out = nullptr);

// Orthonormal 2-D DCT-II and its inverse for power-of-two sizes in {8..128}.
// `in` and `out` are row-major height x width and must not alias.
void dct_2d(const double* in, double* out, int width, int height);
void idct_2d(const double* in, double* out, int width, int height);

}  // namespace mevhas

#endif  // MEVHAS_TRANSFORM_HPP_
