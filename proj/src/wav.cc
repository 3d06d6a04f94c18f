// wav.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/wav.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace incar {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

namespace {

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xFFFE;

template <typename T>
T ReadLe(std::istream &is) {
  T v{};
  is.read(reinterpret_cast<char *>(&v), sizeof(T));
  if (!is) throw Error("truncated WAV stream");
  return v;
}

template <typename T>
void WriteLe(std::ostream &os, T v) {
  os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

std::string ReadTag(std::istream &is) {
  std::array<char, 4> tag{};
  is.read(tag.data(), 4);
  if (!is) throw Error("truncated WAV stream");
  return std::string(tag.data(), 4);
}

}  // namespace

AudioBuffer ReadWav(std::istream &is) {
  if (ReadTag(is) != "RIFF") throw Error("not a RIFF file");
  ReadLe<uint32_t>(is);
  if (ReadTag(is) != "WAVE") throw Error("not a WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  while (true) {
    std::string tag = ReadTag(is);
    uint32_t size = ReadLe<uint32_t>(is);
    if (tag == "fmt ") {
      if (size < 16) throw Error("short fmt chunk");
      format = ReadLe<uint16_t>(is);
      channels = ReadLe<uint16_t>(is);
      rate = ReadLe<uint32_t>(is);
      ReadLe<uint32_t>(is);  // byte rate
      ReadLe<uint16_t>(is);  // block align
      bits = ReadLe<uint16_t>(is);
      uint32_t rest = size - 16;
      if (format == kFormatExtensible) {
        if (rest < 24) throw Error("short extensible fmt chunk");
        ReadLe<uint16_t>(is);  // cbSize
        ReadLe<uint16_t>(is);  // valid bits
        ReadLe<uint32_t>(is);  // channel mask
        format = ReadLe<uint16_t>(is);
        rest -= 10;
      }
      is.ignore(rest + (size & 1));
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw Error("data chunk before fmt chunk");
      if (channels == 0) throw Error("WAV has zero channels");
      bool pcm16 = format == kFormatPcm && bits == 16;
      bool f32 = format == kFormatFloat && bits == 32;
      if (!pcm16 && !f32)
        throw Error("unsupported WAV encoding (format " +
                    std::to_string(format) + ", " + std::to_string(bits) +
                    " bits)");
      size_t frame_bytes = static_cast<size_t>(channels) * bits / 8;
      size_t frames = size / frame_bytes;
      std::vector<char> raw(frames * frame_bytes);
      is.read(raw.data(), static_cast<std::streamsize>(raw.size()));
      if (static_cast<size_t>(is.gcount()) != raw.size())
        throw Error("truncated WAV data chunk");
      RealMatrix samples(channels, static_cast<Eigen::Index>(frames));
      for (size_t n = 0; n < frames; ++n) {
        for (uint16_t c = 0; c < channels; ++c) {
          const char *p = raw.data() + n * frame_bytes + c * bits / 8;
          if (pcm16) {
            int16_t s;
            std::memcpy(&s, p, 2);
            samples(c, n) = s / 32768.0;
          } else {
            float s;
            std::memcpy(&s, p, 4);
            samples(c, n) = s;
          }
        }
      }
      return AudioBuffer(std::move(samples), static_cast<int>(rate));
    } else {
      is.ignore(size + (size & 1));
      if (!is) throw Error("WAV stream ended before data chunk");
    }
  }
}

AudioBuffer ReadWav(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  try {
    return ReadWav(is);
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

void WriteWav(std::ostream &os, const AudioBuffer &audio, WavFormat format) {
  const uint16_t channels = static_cast<uint16_t>(audio.channels());
  const uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const uint32_t block = channels * bits / 8;
  const uint32_t data_size =
      static_cast<uint32_t>(audio.num_samples()) * block;
  os.write("RIFF", 4);
  WriteLe<uint32_t>(os, 36 + data_size);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  WriteLe<uint32_t>(os, 16);
  WriteLe<uint16_t>(os, format == WavFormat::kPcm16 ? kFormatPcm
                                                    : kFormatFloat);
  WriteLe<uint16_t>(os, channels);
  WriteLe<uint32_t>(os, static_cast<uint32_t>(audio.sample_rate()));
  WriteLe<uint32_t>(os, static_cast<uint32_t>(audio.sample_rate()) * block);
  WriteLe<uint16_t>(os, static_cast<uint16_t>(block));
  WriteLe<uint16_t>(os, bits);
  os.write("data", 4);
  WriteLe<uint32_t>(os, data_size);

  const RealMatrix &s = audio.samples();
  std::vector<char> raw(data_size);
  char *p = raw.data();
  for (Eigen::Index n = 0; n < audio.num_samples(); ++n) {
    for (Eigen::Index c = 0; c < audio.channels(); ++c) {
      if (format == WavFormat::kPcm16) {
        double v = std::clamp(std::round(s(c, n) * 32768.0), -32768.0, 32767.0);
        int16_t q = static_cast<int16_t>(v);
        std::memcpy(p, &q, 2);
        p += 2;
      } else {
        float f = static_cast<float>(s(c, n));
        std::memcpy(p, &f, 4);
        p += 4;
      }
    }
  }
  os.write(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!os) throw Error("failed writing WAV stream");
}

void WriteWav(const std::string &path, const AudioBuffer &audio,
              WavFormat format) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp + " for writing");
    WriteWav(os, audio, format);
  }
  std::filesystem::rename(tmp, path);
}

void CheckSameRate(const AudioBuffer &a, const AudioBuffer &b) {
  if (a.sample_rate() != b.sample_rate())
    throw Error("sample rate mismatch: " + std::to_string(a.sample_rate()) +
                " vs " + std::to_string(b.sample_rate()));
}

}  // namespace incar
