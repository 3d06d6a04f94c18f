// wav.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_WAV_H_
#define INCAR_WAV_H_

#include <istream>
#include <ostream>
#include <string>

#include "incar/core.h"

namespace incar {

enum class WavFormat { kPcm16, kFloat32 };

// Little-endian RIFF/WAVE, PCM 16-bit or IEEE float 32-bit, interleaved.
// WAVE_FORMAT_EXTENSIBLE headers carrying either subformat are accepted.
AudioBuffer ReadWav(std::istream &is);
AudioBuffer ReadWav(const std::string &path);

// PCM16 clips to [-1, 1).
void WriteWav(std::ostream &os, const AudioBuffer &audio,
              WavFormat format = WavFormat::kPcm16);
// Writes to a temporary sibling and renames into place.
void WriteWav(const std::string &path, const AudioBuffer &audio,
              WavFormat format = WavFormat::kPcm16);

// Throws when sample rates differ; resampling is never implicit.
void CheckSameRate(const AudioBuffer &a, const AudioBuffer &b);

}  // namespace incar

#endif  // INCAR_WAV_H_
