// refine.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Trims diarization segments to VAD speech.

#ifndef INCAR_REFINE_H_
#define INCAR_REFINE_H_

#include <map>
#include <string>
#include <vector>

#include "incar/core.h"
#include "incar/rttm.h"

namespace incar {

struct RefineConfig {
  double min_duration = 0.1;  // shorter fragments are dropped
  double gap_merge = 0.3;     // fragments of one segment closer than this are rejoined
};

// Speech regions per recording, absolute seconds.
using VadRegions = std::map<std::string, std::vector<Interval>>;

// Segment i is intersected with speech[i] (absolute seconds). Fragments
// of the same segment separated by less than gap_merge are rejoined,
// fragments shorter than min_duration are dropped, and touching
// same-speaker results are merged. The result never covers time outside
// the input segments.
RttmSegmentList RefineSegments(const RttmSegmentList &segments,
                               const std::vector<std::vector<Interval>> &speech,
                               const RefineConfig &config = {});

// Same, with one VAD region list per recording. Every recording in the
// RTTM must have an entry.
RttmSegmentList RefineRttm(const RttmSegmentList &rttm, const VadRegions &vad,
                           const RefineConfig &config = {});

// Same-speaker union per recording, sorted.
inline RttmSegmentList NormalizeRttm(const RttmSegmentList &rttm) {
  return MergeSpeakerSegments(rttm, 0.0);
}

}  // namespace incar

#endif  // INCAR_REFINE_H_
