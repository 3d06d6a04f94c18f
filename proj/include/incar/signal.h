// signal.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_SIGNAL_H_
#define INCAR_SIGNAL_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "incar/core.h"

namespace incar {

struct SiSdrBreakdown {
  double alpha = 0.0;     // optimal projection scale <est, ref> / |ref|^2
  double value_db = 0.0;  // +inf for zero residual, -inf for alpha == 0
};

// Scale-invariant SDR of an estimate against a reference, both 1-D
// expressions of equal length.
template <typename RefDerived, typename EstDerived>
SiSdrBreakdown SiSdr(const Eigen::MatrixBase<RefDerived> &reference,
                     const Eigen::MatrixBase<EstDerived> &estimate) {
  using Scalar = typename RefDerived::Scalar;
  if (reference.size() != estimate.size())
    throw Error("SI-SDR length mismatch");
  const auto s = reference.reshaped();
  const auto e = estimate.reshaped();
  const Scalar ref_energy = s.squaredNorm();
  if (ref_energy == Scalar(0)) throw Error("SI-SDR reference is all zero");
  SiSdrBreakdown out;
  out.alpha = static_cast<double>(s.dot(e) / ref_energy);
  const Scalar target = out.alpha * out.alpha * ref_energy;
  const Scalar residual = (out.alpha * s - e).squaredNorm();
  if (residual == Scalar(0)) {
    out.value_db = std::numeric_limits<double>::infinity();
  } else if (target == Scalar(0)) {
    out.value_db = -std::numeric_limits<double>::infinity();
  } else {
    out.value_db = 10.0 * std::log10(static_cast<double>(target / residual));
  }
  return out;
}

// Mono buffers; throws on channel-count or rate mismatch.
SiSdrBreakdown SiSdr(const AudioBuffer &reference, const AudioBuffer &estimate);

struct MixOptions {
  // Draw the noise segment start uniformly from the valid offsets.
  bool random_offset = false;
  // Tile the noise when it is shorter than the clean signal; otherwise
  // a short noise is an error.
  bool loop_noise = false;
  uint64_t seed = 0;
};

struct MixResult {
  AudioBuffer mixture;
  AudioBuffer scaled_noise;
  double gain = 0.0;
};

// clean + g * noise_segment with g chosen so the clean-to-noise power
// ratio equals snr_db.
MixResult MixAtSnr(const AudioBuffer &clean, const AudioBuffer &noise,
                   double snr_db, const MixOptions &options = {});

// Resamples by 1/factor with a 64-tap windowed-sinc polyphase filter;
// duration and pitch both scale by 1/factor. factor must be in [0.5, 2].
AudioBuffer SpeedPerturb(const AudioBuffer &audio, double factor);

struct SpecAugmentPolicy {
  int num_time_masks = 0;
  int max_time_width = 0;
  int num_freq_masks = 0;
  int max_freq_width = 0;
  uint64_t seed = 0;
};

using BinaryMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// frames x features mask, true = kept.
BinaryMask SpecAugmentMasks(Eigen::Index frames, Eigen::Index features,
                            const SpecAugmentPolicy &policy);

// Geometric over arithmetic mean of the Hann-windowed power spectrum of
// consecutive non-overlapping frames. Silent frames report 1.0.
std::vector<double> SpectralFlatness(const AudioBuffer &audio, int frame);

struct MusicFilterConfig {
  int frame = 512;
  double flatness_lo = 0.2;
  double flatness_hi = 0.6;
  double energy_threshold_db = -30.0;  // mean power, dB re full scale
};

// Heuristic stand-in for an audio-event classifier: flags tonal but
// broadband loud content as music.
bool LooksLikeMusic(const AudioBuffer &audio, const MusicFilterConfig &config);

// Full linear convolution of two 1-D signals via FFT.
RealVector FftConvolve(const RealVector &a, const RealVector &b);

inline double PowerDb(double power) {
  return 10.0 * std::log10(std::max(power, 1e-20));
}

}  // namespace incar

#endif  // INCAR_SIGNAL_H_
