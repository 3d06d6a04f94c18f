// gss.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Guided source separation: a complex angular central Gaussian mixture
// (CACGMM) over unit-norm multichannel STFT vectors, with class priors
// gated by diarization activity, followed by mask-based MVDR
// beamforming toward each target speaker.

#ifndef INCAR_GSS_H_
#define INCAR_GSS_H_

#include <string>
#include <vector>

#include "incar/core.h"
#include "incar/rttm.h"
#include "incar/stft.h"

namespace incar {

// Per-class, per-frame activity gate. Rows 0..K-2 are speakers in the
// order of `speakers`; row K-1 is the always-on noise class.
struct ActivityMatrix {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> active;
  std::vector<std::string> speakers;

  Eigen::Index classes() const { return active.rows(); }
  Eigen::Index frames() const { return active.cols(); }
  Eigen::Index noise_class() const { return active.rows() - 1; }
  // Throws unless the noise row is all ones and speakers match the rows.
  void Validate() const;
};

// Frame t is stamped at time_offset + t * hop_seconds and is active for
// a speaker when that time falls in one of the speaker's segments, each
// dilated by ceil(context_seconds / hop_seconds) frames per side. An
// empty RTTM yields a noise-only matrix; a non-empty RTTM without the
// recording is an error.
ActivityMatrix ActivityFromRttm(const RttmSegmentList &rttm,
                                const std::string &recording,
                                Eigen::Index frames, double hop_seconds,
                                double context_seconds,
                                double time_offset = 0.0);

struct CacgmmState {
  RealMatrix weights;                            // K x F, simplex per column
  std::vector<std::vector<ComplexMatrix>> shapes;  // [k][f], D x D, trace D
};

// Class posteriors, stored per frequency bin as a K x T matrix.
class MaskTensor {
 public:
  MaskTensor() = default;
  MaskTensor(Eigen::Index classes, Eigen::Index frames, Eigen::Index bins);

  Eigen::Index classes() const { return classes_; }
  Eigen::Index frames() const { return frames_; }
  Eigen::Index bins() const { return static_cast<Eigen::Index>(per_bin_.size()); }

  const RealMatrix &bin(Eigen::Index f) const { return per_bin_[f]; }
  RealMatrix &bin(Eigen::Index f) { return per_bin_[f]; }
  double operator()(Eigen::Index k, Eigen::Index t, Eigen::Index f) const {
    return per_bin_[f](k, t);
  }
  // frames x bins posterior of class k.
  RealMatrix ForClass(Eigen::Index k) const;

 private:
  Eigen::Index classes_ = 0;
  Eigen::Index frames_ = 0;
  std::vector<RealMatrix> per_bin_;
};

struct EmConfig {
  int iterations = 20;
  // Diagonal loading of each shape matrix, relative to its trace.
  double epsilon = 1e-10;
};

struct EmResult {
  CacgmmState state;
  MaskTensor masks;  // posteriors from a final E-step on `state`
  // (iterations + 1) x F. Row i is the log-likelihood of the parameters
  // after i M-steps.
  RealMatrix log_likelihood;

  // Sum over frequency of each row.
  RealVector TotalLogLikelihood() const { return log_likelihood.rowwise().sum(); }
};

// Guided EM. Initialization: identity shapes, weights uniform over the
// classes that are active at least once. Frequencies are independent.
// Frames with zero norm contribute no statistics; their posterior is the
// gated prior.
EmResult EmFit(const Spectrogram &spec, const ActivityMatrix &activity,
               const EmConfig &config = {});

struct SpatialCovariances {
  std::vector<ComplexMatrix> target;  // per bin, D x D
  std::vector<ComplexMatrix> noise;
  // Bins whose mask (or its complement) summed to zero and fell back to
  // the unmasked covariance.
  std::vector<bool> target_fallback;
  std::vector<bool> noise_fallback;
};

// Target covariance weighted by the class-k posterior, noise covariance
// by its complement.
SpatialCovariances EstimateSpatialCovariances(const Spectrogram &spec,
                                              const MaskTensor &masks,
                                              Eigen::Index target_class);

struct BeamformerWeights {
  std::vector<ComplexVector> w;  // per bin, D
  Eigen::Index ref_channel = 0;
};

// Souden MVDR: w = (Phi_n^-1 Phi_s / tr(Phi_n^-1 Phi_s)) e_ref, where
// Phi_n is loaded with loading * tr(Phi_n) / D on the diagonal. Throws
// with the bin index when the loaded noise matrix has condition number
// above 1e12.
BeamformerWeights MvdrSouden(const std::vector<ComplexMatrix> &phi_target,
                             const std::vector<ComplexMatrix> &phi_noise,
                             Eigen::Index ref_channel, double loading);

// y(t, f) = w(f)^H x(t, f).
Spectrogram Beamform(const Spectrogram &spec, const BeamformerWeights &weights);

struct GssConfig {
  StftConfig stft = StftConfig::Default();
  EmConfig em;
  double context_seconds = 15.0;     // audio context on each side
  double activity_context_seconds = 0.0;
  bool post_mask = true;
  double mask_floor = 0.1;
  double loading = 1e-6;
  Eigen::Index ref_channel = 0;
  // Kept for tie-breaks; the guided initialization is deterministic.
  uint64_t seed = 0;
};

// Enhances one RTTM segment: cut with context, STFT, guided EM, MVDR
// toward the segment's speaker, optional mask post-filter, iSTFT, trim.
// The output has round(duration * fs) samples.
AudioBuffer GssEnhance(const AudioBuffer &audio, const RttmSegmentList &rttm,
                       const RttmSegment &segment, const GssConfig &config = {});

}  // namespace incar

#endif  // INCAR_GSS_H_
