// rttm.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef INCAR_RTTM_H_
#define INCAR_RTTM_H_

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace incar {

struct RttmSegment {
  std::string recording;
  std::string speaker;
  double onset = 0.0;
  double duration = 0.0;
  int channel = 1;

  double end() const { return onset + duration; }
  bool operator==(const RttmSegment &) const = default;
};

using RttmSegmentList = std::vector<RttmSegment>;

// Time interval [begin, end) in seconds.
struct Interval {
  double begin = 0.0;
  double end = 0.0;
  double length() const { return end - begin; }
  bool operator==(const Interval &) const = default;
};

// NIST RTTM: ten whitespace-separated fields per SPEAKER line. Other line
// types and ';;' comments are skipped (unknown types with a warning).
RttmSegmentList ParseRttm(std::istream &is);
RttmSegmentList ParseRttmString(const std::string &text);
RttmSegmentList LoadRttm(const std::string &path);

// Onset and duration are written with two decimals.
std::string SerializeRttm(const RttmSegmentList &segments);
void SaveRttm(const std::string &path, const RttmSegmentList &segments);

// Sorted by (recording, onset, speaker, duration).
void SortRttm(RttmSegmentList *segments);

std::vector<std::string> Recordings(const RttmSegmentList &segments);
// Sorted unique speaker labels of one recording.
std::vector<std::string> Speakers(const RttmSegmentList &segments,
                                  const std::string &recording);
// Union of each speaker's segments per recording; segments separated by
// at most max_gap seconds are joined. Output is sorted.
RttmSegmentList MergeSpeakerSegments(const RttmSegmentList &segments,
                                     double max_gap = 0.0);

// Sum of segment durations.
double TotalDuration(const RttmSegmentList &segments);

}  // namespace incar

#endif  // INCAR_RTTM_H_
