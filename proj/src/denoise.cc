// denoise.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/denoise.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace incar {

namespace {

// Mean of the lowest fraction p of an exponential variable, relative to
// its mean: 1 - (1-p)(1 - log(1-p)) / p.
double LowTailBias(double p) {
  if (p >= 1.0) return 1.0;
  return (1.0 - (1.0 - p) * (1.0 - std::log1p(-p))) / p;
}

}  // namespace

AudioBuffer SpectralGateDenoise(const AudioBuffer &audio, const DenoiseConfig &config) {
  if (audio.channels() != 1) throw Error("spectral gating expects mono audio");
  if (audio.num_samples() == 0) throw Error("spectral gating needs non-empty audio");
  if (!(config.low_fraction > 0.0 && config.low_fraction <= 1.0))
    throw Error("low_fraction must lie in (0, 1]");
  if (!(config.gain_floor >= 0.0 && config.gain_floor <= 1.0))
    throw Error("gain_floor must lie in [0, 1]");
  if (audio.Energy() == 0.0) return audio;

  AnalysisPadding padding;
  Spectrogram spec = PaddedStft(audio, config.stft, &padding);
  const Eigen::Index T = spec.frames();
  const Eigen::Index keep = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::ceil(config.low_fraction * T)));
  const double bias = LowTailBias(static_cast<double>(keep) / T);

  std::vector<double> power(T);
  for (Eigen::Index f = 0; f < spec.bins(); ++f) {
    auto row = spec.bin(f).row(0);
    for (Eigen::Index t = 0; t < T; ++t) power[t] = std::norm(row(t));
    std::nth_element(power.begin(), power.begin() + (keep - 1), power.end());
    double low = 0.0;
    for (Eigen::Index i = 0; i < keep; ++i) low += power[i];
    const double noise_mag = std::sqrt(low / keep / bias);
    for (Eigen::Index t = 0; t < T; ++t) {
      const double mag = std::abs(row(t));
      const double gain =
          mag > 0.0 ? std::max(1.0 - noise_mag / mag, config.gain_floor) : config.gain_floor;
      row(t) *= gain;
    }
  }
  return TrimmedIstft(spec, padding);
}

}  // namespace incar
