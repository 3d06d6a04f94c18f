// core.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/core.h"

namespace incar {

AudioBuffer::AudioBuffer(RealMatrix samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  Validate();
}

AudioBuffer::AudioBuffer(Eigen::Index channels, Eigen::Index num_samples,
                         int sample_rate)
    : samples_(RealMatrix::Zero(channels, num_samples)),
      sample_rate_(sample_rate) {
  Validate();
}

AudioBuffer AudioBuffer::Mono(const RealVector &samples, int sample_rate) {
  return AudioBuffer(RealMatrix(samples.transpose()), sample_rate);
}

void AudioBuffer::Validate() const {
  if (samples_.rows() < 1) throw Error("audio buffer needs at least 1 channel");
  if (sample_rate_ <= 0) throw Error("sample rate must be positive");
  if (!samples_.allFinite()) throw Error("audio buffer has non-finite samples");
}

AudioBuffer AudioBuffer::Channel(Eigen::Index c) const {
  if (c < 0 || c >= channels())
    throw Error("channel " + std::to_string(c) + " out of range");
  return AudioBuffer(RealMatrix(samples_.row(c)), sample_rate_);
}

AudioBuffer AudioBuffer::Slice(Eigen::Index begin, Eigen::Index count) const {
  if (count < 0) throw Error("negative slice length");
  RealMatrix out = RealMatrix::Zero(channels(), count);
  Eigen::Index lo = std::max<Eigen::Index>(begin, 0);
  Eigen::Index hi = std::min<Eigen::Index>(begin + count, num_samples());
  if (hi > lo)
    out.middleCols(lo - begin, hi - lo) = samples_.middleCols(lo, hi - lo);
  return AudioBuffer(std::move(out), sample_rate_);
}

double AudioBuffer::Power() const {
  if (samples_.size() == 0) return 0.0;
  return samples_.squaredNorm() / static_cast<double>(samples_.size());
}

}  // namespace incar
