// stft.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/stft.h"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace incar {

namespace {

RealVector MakeWindow(int length, WindowType type) {
  RealVector w(length);
  for (int n = 0; n < length; ++n) {
    double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
    w(n) = type == WindowType::kHann ? hann : std::sqrt(hann);
  }
  return w;
}

}  // namespace

StftConfig::StftConfig(int window_length, int hop, int fft_size,
                       WindowType window)
    : window_length_(window_length),
      hop_(hop),
      fft_size_(fft_size),
      window_type_(window) {
  if (!(0 < hop && hop <= window_length && window_length <= fft_size))
    throw Error("STFT config requires 0 < hop <= window_length <= fft_size");
  window_ = MakeWindow(window_length, window);

  // Overlap-added squared window over one hop period must be flat.
  RealVector cola = RealVector::Zero(hop);
  for (int n = 0; n < window_length; ++n) cola(n % hop) += window_(n) * window_(n);
  double hi = cola.maxCoeff(), lo = cola.minCoeff();
  if (hi <= 0.0 || (hi - lo) > 1e-9 * hi)
    throw Error("STFT config violates the constant-overlap-add condition");
}

Eigen::Index StftConfig::NumFrames(Eigen::Index num_samples) const {
  if (num_samples < window_length_) return 0;
  return (num_samples - window_length_) / hop_ + 1;
}

Eigen::Index StftConfig::SignalLength(Eigen::Index num_frames) const {
  if (num_frames <= 0) return 0;
  return (num_frames - 1) * hop_ + window_length_;
}

Spectrogram::Spectrogram(Eigen::Index channels, Eigen::Index frames,
                         StftConfig config, int sample_rate)
    : channels_(channels),
      frames_(frames),
      config_(std::move(config)),
      sample_rate_(sample_rate),
      bins_(config_.num_bins(), ComplexMatrix::Zero(channels, frames)) {}

Spectrogram Spectrogram::FromFramesByBins(const ComplexMatrix &tf,
                                          const StftConfig &config,
                                          int sample_rate) {
  if (tf.cols() != config.num_bins())
    throw Error("bin count does not match STFT config");
  Spectrogram spec(1, tf.rows(), config, sample_rate);
  for (Eigen::Index f = 0; f < spec.bins(); ++f)
    spec.bin(f).row(0) = tf.col(f).transpose();
  return spec;
}

ComplexMatrix Spectrogram::FramesByBins(Eigen::Index c) const {
  ComplexMatrix tf(frames_, bins());
  for (Eigen::Index f = 0; f < bins(); ++f)
    tf.col(f) = bins_[f].row(c).transpose();
  return tf;
}

Spectrogram Stft(const AudioBuffer &audio, const StftConfig &config) {
  const Eigen::Index frames = config.NumFrames(audio.num_samples());
  if (frames == 0)
    throw Error("audio too short for STFT: " +
                std::to_string(audio.num_samples()) + " samples < window " +
                std::to_string(config.window_length()));
  Spectrogram spec(audio.channels(), frames, config, audio.sample_rate());

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  const int L = config.window_length();
  std::vector<double> buf(config.fft_size(), 0.0);
  std::vector<Complex> out;
  for (Eigen::Index c = 0; c < audio.channels(); ++c) {
    for (Eigen::Index t = 0; t < frames; ++t) {
      const Eigen::Index start = t * config.hop();
      for (int n = 0; n < L; ++n)
        buf[n] = audio.samples()(c, start + n) * config.window()(n);
      fft.fwd(out, buf);
      for (Eigen::Index f = 0; f < spec.bins(); ++f) spec.at(c, t, f) = out[f];
    }
  }
  return spec;
}

AudioBuffer Istft(const Spectrogram &spec) {
  const StftConfig &config = spec.config();
  const int L = config.window_length();
  const Eigen::Index length = config.SignalLength(spec.frames());
  RealMatrix out = RealMatrix::Zero(spec.channels(), length);
  RealVector norm = RealVector::Zero(length);
  const RealVector &w = config.window();
  for (Eigen::Index t = 0; t < spec.frames(); ++t)
    norm.segment(t * config.hop(), L) += w.cwiseAbs2();

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<Complex> half(spec.bins());
  std::vector<double> frame;
  for (Eigen::Index c = 0; c < spec.channels(); ++c) {
    for (Eigen::Index t = 0; t < spec.frames(); ++t) {
      for (Eigen::Index f = 0; f < spec.bins(); ++f) half[f] = spec.at(c, t, f);
      fft.inv(frame, half, config.fft_size());
      const Eigen::Index start = t * config.hop();
      for (int n = 0; n < L; ++n) out(c, start + n) += frame[n] * w(n);
    }
  }
  const double tiny = 1e-10 * norm.maxCoeff();
  for (Eigen::Index n = 0; n < length; ++n) {
    if (norm(n) > tiny)
      out.col(n) /= norm(n);
    else
      out.col(n).setZero();
  }
  return AudioBuffer(std::move(out), spec.sample_rate());
}

AnalysisPadding PaddingFor(Eigen::Index num_samples, const StftConfig &config) {
  AnalysisPadding p;
  p.original_length = num_samples;
  p.left = config.window_length() - config.hop();
  Eigen::Index min_total = p.left + num_samples + p.left;
  min_total = std::max<Eigen::Index>(min_total, config.window_length());
  Eigen::Index excess = (min_total - config.window_length()) % config.hop();
  Eigen::Index total = excess == 0 ? min_total : min_total + config.hop() - excess;
  p.right = total - p.left - num_samples;
  return p;
}

Spectrogram PaddedStft(const AudioBuffer &audio, const StftConfig &config,
                       AnalysisPadding *padding) {
  AnalysisPadding p = PaddingFor(audio.num_samples(), config);
  if (padding) *padding = p;
  AudioBuffer padded =
      audio.Slice(-p.left, p.left + audio.num_samples() + p.right);
  return Stft(padded, config);
}

AudioBuffer TrimmedIstft(const Spectrogram &spec,
                         const AnalysisPadding &padding) {
  AudioBuffer full = Istft(spec);
  return full.Slice(padding.left, padding.original_length);
}

}  // namespace incar
