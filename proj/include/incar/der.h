// der.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Diarization error rate, frame-quantized.

#ifndef INCAR_DER_H_
#define INCAR_DER_H_

#include <map>
#include <string>
#include <vector>

#include "incar/core.h"
#include "incar/rttm.h"

namespace incar {

struct DerConfig {
  double collar = 0.25;      // seconds around each reference boundary
  double resolution = 0.01;  // frame length, seconds
};

struct DerReport {
  double reference_seconds = 0.0;  // scored reference speech
  double missed_seconds = 0.0;
  double false_alarm_seconds = 0.0;
  double confusion_seconds = 0.0;
  double missed_pct = 0.0;
  double false_alarm_pct = 0.0;
  double confusion_pct = 0.0;
  double der_pct = 0.0;  // sum of the three percentages
  // recording -> hypothesis speaker -> reference speaker. Unmapped
  // hypothesis speakers are absent.
  std::map<std::string, std::map<std::string, std::string>> speaker_map;
};

// Rectangular assignment maximizing the total weight. Returns, for each
// row, the assigned column or -1 when there are more rows than columns.
std::vector<int> MaxWeightAssignment(const RealMatrix &weight);

// Frame i spans [i*res, (i+1)*res) and counts for a segment when its
// center lies in [onset, onset + duration). With a collar, frames whose
// center is within `collar` of any reference boundary are not scored.
// Per frame: missed = max(0, Nref - Nhyp), false alarm = max(0, Nhyp -
// Nref), confusion = min(Nref, Nhyp) - correct, where correct counts
// hypothesis speakers whose mapped reference speaker is also active.
// Speakers are mapped per recording by maximum frame overlap.
DerReport ScoreDer(const RttmSegmentList &reference, const RttmSegmentList &hypothesis,
                   const DerConfig &config = {});

}  // namespace incar

#endif  // INCAR_DER_H_
