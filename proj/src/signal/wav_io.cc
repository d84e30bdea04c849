// signal/wav_io.cc

// Copyright 2026 The octsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "signal/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace octsep {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t ReadU32(const unsigned char *p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}
std::uint16_t ReadU16(const unsigned char *p) { return std::uint16_t(p[0] | (p[1] << 8)); }

void PutU32(std::ostream &os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char *>(b), 4);
}
void PutU16(std::ostream &os, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char *>(b), 2);
}

struct ParsedWav {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  std::vector<unsigned char> data;
  std::size_t data_bytes = 0;
};

ParsedWav Parse(const std::string &path, bool read_data) {
  std::ifstream in(path, std::ios::binary);
  Require(in.good(), ErrorCode::kIo, "cannot open wav file: ", path);
  unsigned char riff[12];
  in.read(reinterpret_cast<char *>(riff), 12);
  Require(in.gcount() == 12 && std::memcmp(riff, "RIFF", 4) == 0 &&
              std::memcmp(riff + 8, "WAVE", 4) == 0,
          ErrorCode::kData, "not a RIFF/WAVE file: ", path);
  ParsedWav w;
  bool have_fmt = false, have_data = false;
  unsigned char chunk[8];
  while (!have_data && in.read(reinterpret_cast<char *>(chunk), 8)) {
    const std::uint32_t size = ReadU32(chunk + 4);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      std::vector<unsigned char> fmt(size);
      in.read(reinterpret_cast<char *>(fmt.data()), size);
      Require(size >= 16 && static_cast<std::uint32_t>(in.gcount()) == size, ErrorCode::kData,
              "truncated fmt chunk: ", path);
      w.format = ReadU16(fmt.data());
      w.channels = ReadU16(fmt.data() + 2);
      w.rate = ReadU32(fmt.data() + 4);
      w.bits = ReadU16(fmt.data() + 14);
      if (w.format == kFormatExtensible) {
        Require(size >= 26, ErrorCode::kData, "truncated extensible fmt chunk: ", path);
        w.format = ReadU16(fmt.data() + 24);
      }
      if (size & 1) in.seekg(1, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      Require(have_fmt, ErrorCode::kData, "data chunk before fmt chunk: ", path);
      w.data_bytes = size;
      if (read_data) {
        w.data.resize(size);
        in.read(reinterpret_cast<char *>(w.data.data()), size);
        Require(static_cast<std::uint32_t>(in.gcount()) == size, ErrorCode::kData,
                "truncated data chunk: ", path);
      }
      have_data = true;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
  Require(have_fmt && have_data, ErrorCode::kData, "missing fmt or data chunk: ", path);
  Require(w.channels == 1, ErrorCode::kUnsupported, "only mono wav is supported (", path, " has ",
          w.channels, " channels)");
  Require((w.format == kFormatPcm && w.bits == 16) || (w.format == kFormatFloat && w.bits == 32),
          ErrorCode::kUnsupported, "unsupported wav encoding (format ", w.format, ", ", w.bits,
          " bits): ", path);
  Require(w.rate > 0, ErrorCode::kData, "zero sample rate: ", path);
  return w;
}

}  // namespace

WavInfo ProbeWav(const std::string &path) {
  const ParsedWav w = Parse(path, false);
  return {w.data_bytes / (w.bits / 8), static_cast<int>(w.rate), w.channels};
}

Waveform ReadWav(const std::string &path) {
  const ParsedWav w = Parse(path, true);
  Waveform out;
  out.sample_rate = static_cast<int>(w.rate);
  const std::size_t n = w.data.size() / (w.bits / 8);
  out.samples.resize(n);
  if (w.format == kFormatPcm) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = static_cast<std::int16_t>(ReadU16(&w.data[2 * i]));
      out.samples[i] = v / 32768.0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint32_t bits = ReadU32(&w.data[4 * i]);
      float f;
      std::memcpy(&f, &bits, 4);
      out.samples[i] = f;
    }
  }
  return out;
}

void WriteWav(const std::string &path, const Waveform &wave, WavFormat format) {
  Require(wave.sample_rate > 0, ErrorCode::kInvalidArgument, "write_wav: bad sample rate");
  std::ofstream os(path, std::ios::binary);
  Require(os.good(), ErrorCode::kIo, "cannot write wav file: ", path);
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(wave.size() * (bits / 8));
  os.write("RIFF", 4);
  PutU32(os, 36 + data_bytes);
  os.write("WAVEfmt ", 8);
  PutU32(os, 16);
  PutU16(os, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(os, 1);
  PutU32(os, static_cast<std::uint32_t>(wave.sample_rate));
  PutU32(os, static_cast<std::uint32_t>(wave.sample_rate) * (bits / 8));
  PutU16(os, bits / 8);
  PutU16(os, bits);
  os.write("data", 4);
  PutU32(os, data_bytes);
  for (double v : wave.samples) {
    if (format == WavFormat::kPcm16) {
      const double scaled = std::round(std::clamp(v, -1.0, 32767.0 / 32768.0) * 32768.0);
      PutU16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
    } else {
      const float f = static_cast<float>(v);
      std::uint32_t b;
      std::memcpy(&b, &f, 4);
      PutU32(os, b);
    }
  }
  Require(os.good(), ErrorCode::kIo, "write failed: ", path);
}

}  // namespace octsep
