// stft.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_STFT_H_
#define INCAR_STFT_H_

#include <vector>

#include "incar/core.h"

namespace incar {

enum class WindowType { kHann, kSqrtHann };

// Analysis parameters. Analysis and synthesis share the window, so the
// constructor requires the squared window to overlap-add to a constant
// at the given hop.
class StftConfig {
 public:
  StftConfig(int window_length, int hop, int fft_size,
             WindowType window = WindowType::kSqrtHann);
  // 1024-sample sqrt-Hann window, hop 256.
  static StftConfig Default() { return StftConfig(1024, 256, 1024); }

  int window_length() const { return window_length_; }
  int hop() const { return hop_; }
  int fft_size() const { return fft_size_; }
  int num_bins() const { return fft_size_ / 2 + 1; }
  WindowType window_type() const { return window_type_; }
  const RealVector &window() const { return window_; }

  // floor((n - window_length) / hop) + 1; zero when n < window_length.
  Eigen::Index NumFrames(Eigen::Index num_samples) const;
  Eigen::Index SignalLength(Eigen::Index num_frames) const;

 private:
  int window_length_;
  int hop_;
  int fft_size_;
  WindowType window_type_;
  RealVector window_;
};

// Complex STFT, channels x frames x bins. Stored per frequency bin as a
// channels x frames matrix, which is the layout every spatial estimator
// in this library consumes.
class Spectrogram {
 public:
  Spectrogram(Eigen::Index channels, Eigen::Index frames, StftConfig config,
              int sample_rate);

  Eigen::Index channels() const { return channels_; }
  Eigen::Index frames() const { return frames_; }
  Eigen::Index bins() const { return static_cast<Eigen::Index>(bins_.size()); }
  const StftConfig &config() const { return config_; }
  int sample_rate() const { return sample_rate_; }

  // channels x frames observation matrix at bin f.
  const ComplexMatrix &bin(Eigen::Index f) const { return bins_[f]; }
  ComplexMatrix &bin(Eigen::Index f) { return bins_[f]; }

  Complex &at(Eigen::Index c, Eigen::Index t, Eigen::Index f) {
    return bins_[f](c, t);
  }
  Complex at(Eigen::Index c, Eigen::Index t, Eigen::Index f) const {
    return bins_[f](c, t);
  }

  // Single-channel spectrogram from a frames x bins matrix.
  static Spectrogram FromFramesByBins(const ComplexMatrix &tf,
                                      const StftConfig &config,
                                      int sample_rate);
  // frames x bins matrix of channel c.
  ComplexMatrix FramesByBins(Eigen::Index c) const;

 private:
  Eigen::Index channels_;
  Eigen::Index frames_;
  StftConfig config_;
  int sample_rate_;
  std::vector<ComplexMatrix> bins_;
};

// No center padding. Throws when the audio is shorter than one window.
Spectrogram Stft(const AudioBuffer &audio, const StftConfig &config);

// Weighted overlap-add with per-sample window-power normalization.
// Output length is (frames - 1) * hop + window_length.
AudioBuffer Istft(const Spectrogram &spec);

// Zero padding that makes every original sample an interior sample of
// the analysis, so Istft reconstructs it exactly.
struct AnalysisPadding {
  Eigen::Index left = 0;
  Eigen::Index right = 0;
  Eigen::Index original_length = 0;
};

AnalysisPadding PaddingFor(Eigen::Index num_samples, const StftConfig &config);
Spectrogram PaddedStft(const AudioBuffer &audio, const StftConfig &config,
                       AnalysisPadding *padding);
// Inverts PaddedStft and trims back to the original length.
AudioBuffer TrimmedIstft(const Spectrogram &spec,
                         const AnalysisPadding &padding);

}  // namespace incar

#endif  // INCAR_STFT_H_
