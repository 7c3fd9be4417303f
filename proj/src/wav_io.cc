// Copyright 2026 The SSANC Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ssanc/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <fmt/format.h>

#include "ssanc/errors.h"

namespace ssanc {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back((v >> 8) & 0xFF);
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void PutTag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

struct FormatChunk {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

FormatChunk ParseFormat(const std::uint8_t* p, std::uint32_t size,
                        const std::string& path) {
  if (size < 16) {
    throw IoError(fmt::format("{}: fmt chunk size {} is shorter than 16",
                              path, size));
  }
  FormatChunk f;
  f.tag = ReadU16(p);
  f.channels = ReadU16(p + 2);
  f.sample_rate = ReadU32(p + 4);
  f.block_align = ReadU16(p + 12);
  f.bits = ReadU16(p + 14);
  if (f.tag == kFormatExtensible) {
    if (size < 40) {
      throw IoError(fmt::format(
          "{}: extensible fmt chunk size {} is shorter than 40", path, size));
    }
    // The first two bytes of the subformat GUID carry the plain format tag.
    f.tag = ReadU16(p + 24);
  }
  if (f.tag != kFormatPcm && f.tag != kFormatFloat) {
    throw IoError(fmt::format("{}: unsupported audio format tag {}", path,
                              f.tag));
  }
  if (f.tag == kFormatPcm && f.bits != 16) {
    throw IoError(fmt::format("{}: unsupported PCM bits_per_sample {}", path,
                              f.bits));
  }
  if (f.tag == kFormatFloat && f.bits != 32) {
    throw IoError(fmt::format("{}: unsupported float bits_per_sample {}",
                              path, f.bits));
  }
  if (f.channels == 0) {
    throw IoError(fmt::format("{}: num_channels is 0", path));
  }
  if (f.sample_rate == 0) {
    throw IoError(fmt::format("{}: sample_rate is 0", path));
  }
  if (f.block_align != f.channels * (f.bits / 8)) {
    throw IoError(fmt::format("{}: block_align {} inconsistent with {} "
                              "channels of {} bits",
                              path, f.block_align, f.channels, f.bits));
  }
  return f;
}

}  // namespace

MultichannelSignal ReadMultichannelWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("{}: cannot open for reading", path));
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (bytes.size() < 12) {
    throw IoError(fmt::format("{}: file too short for RIFF header", path));
  }
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0) {
    throw IoError(fmt::format("{}: missing RIFF chunk id", path));
  }
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError(fmt::format("{}: RIFF form type is not WAVE", path));
  }

  FormatChunk format;
  bool have_format = false;
  const std::uint8_t* data = nullptr;
  std::uint32_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = ReadU32(chunk + 4);
    if (pos + 8 + static_cast<std::size_t>(size) > bytes.size()) {
      throw IoError(fmt::format(
          "{}: chunk '{}' declares {} bytes but the file is truncated", path,
          std::string(reinterpret_cast<const char*>(chunk), 4), size));
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      format = ParseFormat(chunk + 8, size, path);
      have_format = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos += 8 + size + (size & 1);
  }
  if (!have_format) throw IoError(fmt::format("{}: missing fmt chunk", path));
  if (data == nullptr) {
    throw IoError(fmt::format("{}: missing data chunk", path));
  }
  if (data_size % format.block_align != 0) {
    throw IoError(fmt::format(
        "{}: data size {} is not a multiple of block_align {}", path,
        data_size, format.block_align));
  }
  const std::size_t frames = data_size / format.block_align;
  if (frames == 0) throw IoError(fmt::format("{}: data chunk is empty", path));

  std::vector<std::vector<double>> channels(format.channels,
                                            std::vector<double>(frames));
  const int width = format.bits / 8;
  for (std::size_t n = 0; n < frames; ++n) {
    for (int c = 0; c < format.channels; ++c) {
      const std::uint8_t* p = data + n * format.block_align + c * width;
      if (format.tag == kFormatPcm) {
        const auto v = static_cast<std::int16_t>(ReadU16(p));
        channels[c][n] = static_cast<double>(v) / 32768.0;
      } else {
        const std::uint32_t bits = ReadU32(p);
        float v;
        std::memcpy(&v, &bits, sizeof(v));
        channels[c][n] = static_cast<double>(v);
      }
    }
  }
  return MultichannelSignal(std::move(channels),
                            static_cast<int>(format.sample_rate));
}

void WriteMultichannelWav(const MultichannelSignal& signal,
                          const std::string& path, WavFormat format) {
  const int channels = signal.num_channels();
  const std::size_t frames = signal.num_samples();
  const int width = format == WavFormat::kPcm16 ? 2 : 4;
  const std::size_t data_size = frames * channels * width;
  if (data_size > 0xFFFFFFF0u) {
    throw IoError(fmt::format("{}: signal too large for a RIFF file", path));
  }

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  PutTag(out, "RIFF");
  PutU32(out, static_cast<std::uint32_t>(36 + data_size));
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(out, static_cast<std::uint16_t>(channels));
  PutU32(out, static_cast<std::uint32_t>(signal.sample_rate()));
  PutU32(out, static_cast<std::uint32_t>(signal.sample_rate() * channels *
                                         width));
  PutU16(out, static_cast<std::uint16_t>(channels * width));
  PutU16(out, static_cast<std::uint16_t>(8 * width));
  PutTag(out, "data");
  PutU32(out, static_cast<std::uint32_t>(data_size));
  for (std::size_t n = 0; n < frames; ++n) {
    for (int c = 0; c < channels; ++c) {
      const double v = signal.channels()[c][n];
      if (format == WavFormat::kPcm16) {
        const double scaled = std::clamp(std::round(v * 32768.0), -32768.0,
                                         32767.0);
        PutU16(out, static_cast<std::uint16_t>(
                        static_cast<std::int16_t>(scaled)));
      } else {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, sizeof(bits));
        PutU32(out, bits);
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(fmt::format("{}: cannot open for writing", path));
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError(fmt::format("{}: write failed", path));
}

}  // namespace ssanc
