/*
 *  Copyright (c) 2026 The mevhas-testbed authors. All rights reserved.
 *
 *  Use of this source code is governed by a BSD-style license
 *  that can be found in the LICENSE file in the root of the source tree.
 */

#include "mevhas/y4m.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mevhas {

namespace {

constexpr char kMagic[] = "YUV4MPEG2";

struct Header {
  int width = 0;
  int height = 0;
  Fps fps;
  bool mono = false;
};

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("y4m: " + what);
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    const int value = std::stoi(text, &pos);
    if (pos != text.size()) fail("malformed " + what + " '" + text + "'");
    return value;
  } catch (const std::invalid_argument&) {
    fail("malformed " + what + " '" + text + "'");
  } catch (const std::out_of_range&) {
    fail("out-of-range " + what + " '" + text + "'");
  }
}

Header parse_header(const std::string& line) {
  std::istringstream tokens(line);
  std::string magic;
  tokens >> magic;
  if (magic != kMagic) fail("stream does not start with YUV4MPEG2");

  Header header;
  bool have_w = false, have_h = false, have_f = false;
  std::string tag;
  while (tokens >> tag) {
    switch (tag[0]) {
      case 'W':
        header.width = parse_int(tag.substr(1), "width");
        have_w = true;
        break;
      case 'H':
        header.height = parse_int(tag.substr(1), "height");
        have_h = true;
        break;
      case 'F': {
        const std::string body = tag.substr(1);
        const std::size_t colon = body.find(':');
        if (colon == std::string::npos) fail("malformed frame rate '" + tag + "'");
        header.fps.num = parse_int(body.substr(0, colon), "frame rate");
        header.fps.den = parse_int(body.substr(colon + 1), "frame rate");
        have_f = true;
        break;
      }
      case 'C': {
        const std::string chroma = tag.substr(1);
        if (chroma == "420" || chroma == "420jpeg" || chroma == "420paldv") {
          header.mono = false;
        } else if (chroma == "mono") {
          header.mono = true;
        } else {
          fail("unsupported chroma subsampling tag '" + tag + "'");
        }
        break;
      }
      case 'I':
      case 'A':
      case 'X':
        break;  // interlacing, aspect and extensions carry no luma info
      default:
        fail("unknown header tag '" + tag + "'");
    }
  }
  if (!have_w || !have_h) fail("header is missing W or H");
  if (!have_f) fail("header is missing F");
  if (!header.fps.valid()) fail("fps must be positive");
  if (header.width < 8 || header.height < 8) {
    std::ostringstream msg;
    msg << "frame size " << header.width << "x" << header.height
        << " is below the 8x8 minimum";
    fail(msg.str());
  }
  return header;
}

}  // namespace

VideoSequence read_y4m(std::istream& in) {
  std::string header_line;
  if (!std::getline(in, header_line)) fail("empty stream");
  const Header header = parse_header(header_line);

  const std::size_t luma_size =
      static_cast<std::size_t>(header.width) * header.height;
  const std::size_t chroma_size =
      header.mono ? 0
                  : 2 * (static_cast<std::size_t>((header.width + 1) / 2) *
                         ((header.height + 1) / 2));

  VideoSequence sequence;
  sequence.fps = header.fps;

  std::string frame_line;
  std::size_t frame_index = 0;
  while (std::getline(in, frame_line)) {
    if (frame_line.empty()) continue;
    if (frame_line.rfind("FRAME", 0) != 0) {
      std::ostringstream msg;
      msg << "expected FRAME marker before frame " << frame_index;
      fail(msg.str());
    }
    std::vector<std::uint8_t> luma(luma_size);
    in.read(reinterpret_cast<char*>(luma.data()),
            static_cast<std::streamsize>(luma_size));
    if (static_cast<std::size_t>(in.gcount()) != luma_size) {
      std::ostringstream msg;
      msg << "truncated luma plane in frame " << frame_index;
      fail(msg.str());
    }
    if (chroma_size > 0) {
      in.ignore(static_cast<std::streamsize>(chroma_size));
      if (static_cast<std::size_t>(in.gcount()) != chroma_size) {
        std::ostringstream msg;
        msg << "truncated chroma planes in frame " << frame_index;
        fail(msg.str());
      }
    }
    sequence.frames.emplace_back(header.width, header.height, std::move(luma));
    ++frame_index;
  }
  if (sequence.frames.empty()) fail("stream contains no frames");
  return sequence;
}

VideoSequence read_y4m_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open '" + path + "'");
  return read_y4m(in);
}

void write_y4m(const VideoSequence& sequence, std::ostream& out,
               Y4mChroma chroma) {
  if (sequence.frames.empty()) fail("cannot write empty sequence");
  if (!sequence.fps.valid()) fail("fps must be positive");
  const LumaFrame& first = sequence.frames.front();
  out << kMagic << " W" << first.width << " H" << first.height << " F"
      << sequence.fps.num << ":" << sequence.fps.den << " Ip A0:0 C"
      << (chroma == Y4mChroma::kMono ? "mono" : "420") << "\n";
  const std::size_t chroma_size =
      chroma == Y4mChroma::kMono
          ? 0
          : 2 * (static_cast<std::size_t>((first.width + 1) / 2) *
                 ((first.height + 1) / 2));
  const std::vector<char> neutral(chroma_size, static_cast<char>(128));
  for (const LumaFrame& frame : sequence.frames) {
    if (frame.width != first.width || frame.height != first.height) {
      fail("frames disagree on dimensions");
    }
    out << "FRAME\n";
    out.write(reinterpret_cast<const char*>(frame.samples.data()),
              static_cast<std::streamsize>(frame.samples.size()));
    if (chroma_size > 0) {
      out.write(neutral.data(), static_cast<std::streamsize>(neutral.size()));
    }
  }
}

void write_y4m_file(const VideoSequence& sequence, const std::string& path,
                    Y4mChroma chroma) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot open '" + path + "' for writing");
  write_y4m(sequence, out, chroma);
}

}  // namespace mevhas
