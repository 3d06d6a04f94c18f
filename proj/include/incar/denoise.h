// denoise.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_DENOISE_H_
#define INCAR_DENOISE_H_

#include "incar/core.h"
#include "incar/stft.h"

namespace incar {

struct DenoiseConfig {
  StftConfig stft = StftConfig::Default();
  double gain_floor = 0.1;
  double low_fraction = 0.1;  // quietest share of frames per band used for the floor
};

// Spectral gating. The per-band noise power is the mean of the quietest
// low_fraction of frames, rescaled by the bias of that mean for
// exponentially distributed power. Gain is max(1 - floor/|X|, gain_floor)
// with floor the noise magnitude. Gains never exceed one and the
// analysis is padded, so output energy never exceeds input energy.
AudioBuffer SpectralGateDenoise(const AudioBuffer &audio, const DenoiseConfig &config = {});

}  // namespace incar

#endif  // INCAR_DENOISE_H_
