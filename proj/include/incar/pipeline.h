// pipeline.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Batch orchestration: corpus augmentation, Track I enhancement with
// score fusion, Track II two-pass diarization refinement.

#ifndef INCAR_PIPELINE_H_
#define INCAR_PIPELINE_H_

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "incar/cluster.h"
#include "incar/core.h"
#include "incar/denoise.h"
#include "incar/gss.h"
#include "incar/hooks.h"
#include "incar/iva.h"
#include "incar/manifest.h"
#include "incar/refine.h"
#include "incar/room.h"
#include "incar/rttm.h"
#include "incar/signal.h"
#include "incar/vad.h"

namespace incar {

// Calls fn(i) for every i in [0, n) on up to `workers` threads. The
// first exception thrown by any call is rethrown after all threads join.
void ParallelFor(size_t n, int workers, const std::function<void(size_t)> &fn);

struct AugmentConfig {
  RoomSpec room;
  std::vector<Point3> seats;        // candidate source positions
  std::vector<Point3> microphones;
  double snr_low_db = 0.0;
  double snr_high_db = 10.0;
  std::vector<double> speed_factors{0.9, 1.0, 1.1};
  bool music_filter = true;
  MusicFilterConfig music;
  bool write_components = false;  // also write <id>.image.wav and <id>.noise.wav
  uint64_t seed = 0;
  int workers = 1;
  std::string output_dir;

  // Default cabin geometry.
  static AugmentConfig Default();
};

// Per entry, with a generator seeded from (seed, entry index): optional
// music-filter drop, speed perturbation, far-field simulation from a
// random seat, and noise from a random pool item at an SNR uniform in
// [snr_low_db, snr_high_db]. Unreadable or non-mono entries are skipped
// with a log line. Output order follows the input.
Manifest AugmentCorpus(const Manifest &input, const std::vector<AudioBuffer> &noise_pool,
                       const AugmentConfig &config);

// Candidate tag with the strictly highest score. Failed candidates are
// ignored; ties with "gss" and the all-failed case select "gss".
std::string SelectCandidate(
    const std::vector<std::pair<std::string, std::optional<double>>> &scores);

struct Track1Config {
  GssConfig gss;
  IvaConfig iva;
  bool use_iva = true;
  int workers = 1;
  std::string output_dir;  // chosen audio is written here when set
};

struct Track1Output {
  Manifest selection;  // meta: selected tag, scored flag, per-tag scores
  std::vector<AudioBuffer> audio;  // chosen audio, parallel to selection
};

// Entries name a multichannel recording and an utterance span and
// speaker; the recording id is meta["recording"] or the file stem.
// Candidates are "gss" and "iva-<i>" (IVA outputs cut to the span,
// by descending energy).
Track1Output Track1Infer(const Manifest &eval, const RttmSegmentList &rttm,
                         const Scorer &scorer, const Track1Config &config);

struct Track2Config {
  GssConfig gss;
  VadConfig vad;
  RefineConfig refine;
  DenoiseConfig denoise;
  ClusterConfig cluster;
  int refinement_passes = 1;  // GSS runs refinement_passes + 1 times
  int workers = 1;
};

struct Track2Result {
  RttmSegmentList rttm1;
  RttmSegmentList rttm2;  // after the last refinement pass
  std::vector<AudioBuffer> first_pass;   // parallel to rttm1
  std::vector<AudioBuffer> final_pass;   // parallel to rttm2
};

// RTTM1 is the given list or, failing that, spectral clustering of the
// embeddings. Each pass enhances every segment with GSS, denoises it
// (hook first, built-in gating on hook failure), runs the energy VAD and
// refines the segments; a final GSS pass runs on the refined RTTM.
Track2Result Track2Pipeline(const AudioBuffer &audio, const std::string &recording,
                            const std::optional<RttmSegmentList> &rttm1,
                            const std::optional<EmbeddingSet> &embeddings,
                            const Denoiser &denoise_hook, const Track2Config &config);

}  // namespace incar

#endif  // INCAR_PIPELINE_H_
