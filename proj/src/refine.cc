// refine.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/refine.h"

#include <algorithm>

namespace incar {

namespace {

std::vector<Interval> SortedUnion(std::vector<Interval> v) {
  std::sort(v.begin(), v.end(), [](const Interval &a, const Interval &b) {
    return a.begin < b.begin;
  });
  std::vector<Interval> out;
  for (const auto &i : v) {
    if (i.end <= i.begin) continue;
    if (!out.empty() && i.begin <= out.back().end)
      out.back().end = std::max(out.back().end, i.end);
    else
      out.push_back(i);
  }
  return out;
}

}  // namespace

RttmSegmentList RefineSegments(const RttmSegmentList &segments,
                               const std::vector<std::vector<Interval>> &speech,
                               const RefineConfig &config) {
  if (segments.size() != speech.size())
    throw Error("refinement needs one speech list per segment");
  if (config.min_duration < 0.0 || config.gap_merge < 0.0)
    throw Error("refinement thresholds must be non-negative");
  RttmSegmentList out;
  for (size_t i = 0; i < segments.size(); ++i) {
    const RttmSegment &seg = segments[i];
    std::vector<Interval> pieces;
    for (const auto &r : SortedUnion(speech[i])) {
      Interval cut{std::max(r.begin, seg.onset), std::min(r.end, seg.end())};
      if (cut.end <= cut.begin) continue;
      if (!pieces.empty() && cut.begin - pieces.back().end < config.gap_merge)
        pieces.back().end = cut.end;
      else
        pieces.push_back(cut);
    }
    for (const auto &p : pieces) {
      if (p.length() < config.min_duration) continue;
      RttmSegment s = seg;
      s.onset = p.begin;
      s.duration = p.length();
      out.push_back(s);
    }
  }
  return MergeSpeakerSegments(out, 0.0);
}

RttmSegmentList RefineRttm(const RttmSegmentList &rttm, const VadRegions &vad,
                           const RefineConfig &config) {
  std::vector<std::vector<Interval>> speech;
  speech.reserve(rttm.size());
  for (const auto &seg : rttm) {
    auto it = vad.find(seg.recording);
    if (it == vad.end()) throw Error("no VAD regions for recording " + seg.recording);
    speech.push_back(it->second);
  }
  return RefineSegments(rttm, speech, config);
}

}  // namespace incar
