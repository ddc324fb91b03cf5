/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#ifndef MEVHAS_Y4M_HPP_
#define MEVHAS_Y4M_HPP_

#include <iosfwd>
#include <string>

#include "mevhas/frame.hpp"

namespace mevhas {

// Reads a YUV4MPEG2 stream and keeps only the luma planes. Accepted chroma
// tags: C420, C420jpeg, C420paldv, Cmono (absent C defaults to 420). Frames
// must be at least 8x8.
VideoSequence read_y4m(std::istream& in);
VideoSequence read_y4m_file(const std::string& path);

enum class Y4mChroma { kMono, k420 };

// Writes the sequence as YUV4MPEG2; for k420 the chroma planes are neutral
// gray (128).
void write_y4m(const VideoSequence& sequence, std::ostream& out,
               Y4mChroma chroma = Y4mChroma::kMono);
void write_y4m_file(const VideoSequence& sequence, const std::string& path,
                    Y4mChroma chroma = Y4mChroma::kMono);

}  // namespace mevhas

#endif  // MEVHAS_Y4M_HPP_
