// rttm.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/rttm.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "incar/core.h"
#include "incar/log.h"

namespace incar {

namespace {

double ParseSeconds(const std::string &tok, int lineno, const char *what) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception &) {
    throw Error("RTTM line " + std::to_string(lineno) + ": bad " + what +
                " '" + tok + "'");
  }
}

}  // namespace

RttmSegmentList ParseRttm(std::istream &is) {
  RttmSegmentList out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> fields;
    std::string tok;
    while (ls >> tok) fields.push_back(tok);
    if (fields.empty() || fields[0].rfind(";;", 0) == 0) continue;
    if (fields[0] != "SPEAKER") {
      INCAR_WARN << "RTTM line " << lineno << ": skipping line type "
                 << fields[0];
      continue;
    }
    if (fields.size() != 10)
      throw Error("RTTM line " + std::to_string(lineno) + ": expected 10 fields, got " +
                  std::to_string(fields.size()));
    RttmSegment seg;
    seg.recording = fields[1];
    try {
      seg.channel = std::stoi(fields[2]);
    } catch (const std::exception &) {
      throw Error("RTTM line " + std::to_string(lineno) + ": bad channel");
    }
    seg.onset = ParseSeconds(fields[3], lineno, "onset");
    seg.duration = ParseSeconds(fields[4], lineno, "duration");
    seg.speaker = fields[7];
    if (seg.onset < 0.0)
      throw Error("RTTM line " + std::to_string(lineno) + ": negative onset");
    if (seg.duration < 0.0)
      throw Error("RTTM line " + std::to_string(lineno) + ": negative duration");
    if (seg.duration == 0.0) {
      INCAR_WARN << "RTTM line " << lineno << ": skipping zero-length segment";
      continue;
    }
    out.push_back(std::move(seg));
  }
  return out;
}

RttmSegmentList ParseRttmString(const std::string &text) {
  std::istringstream is(text);
  return ParseRttm(is);
}

RttmSegmentList LoadRttm(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open RTTM " + path);
  try {
    return ParseRttm(is);
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

std::string SerializeRttm(const RttmSegmentList &segments) {
  std::string out;
  char buf[64];
  for (const auto &s : segments) {
    out += "SPEAKER " + s.recording + " " + std::to_string(s.channel) + " ";
    std::snprintf(buf, sizeof(buf), "%.2f %.2f", s.onset, s.duration);
    out += buf;
    out += " <NA> <NA> " + s.speaker + " <NA> <NA>\n";
  }
  return out;
}

void SaveRttm(const std::string &path, const RttmSegmentList &segments) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp + " for writing");
    os << SerializeRttm(segments);
    if (!os) throw Error("failed writing " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("cannot rename " + tmp + " to " + path);
}

void SortRttm(RttmSegmentList *segments) {
  std::stable_sort(segments->begin(), segments->end(),
                   [](const RttmSegment &a, const RttmSegment &b) {
                     return std::tie(a.recording, a.onset, a.speaker, a.duration) <
                            std::tie(b.recording, b.onset, b.speaker, b.duration);
                   });
}

std::vector<std::string> Recordings(const RttmSegmentList &segments) {
  std::set<std::string> recs;
  for (const auto &s : segments) recs.insert(s.recording);
  return {recs.begin(), recs.end()};
}

std::vector<std::string> Speakers(const RttmSegmentList &segments,
                                  const std::string &recording) {
  std::set<std::string> spk;
  for (const auto &s : segments)
    if (s.recording == recording) spk.insert(s.speaker);
  return {spk.begin(), spk.end()};
}

RttmSegmentList MergeSpeakerSegments(const RttmSegmentList &segments,
                                     double max_gap) {
  RttmSegmentList sorted = segments;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const RttmSegment &a, const RttmSegment &b) {
                     return std::tie(a.recording, a.speaker, a.onset) <
                            std::tie(b.recording, b.speaker, b.onset);
                   });
  RttmSegmentList out;
  for (const auto &s : sorted) {
    if (!out.empty()) {
      RttmSegment &last = out.back();
      if (last.recording == s.recording && last.speaker == s.speaker &&
          s.onset - last.end() <= max_gap + 1e-9) {
        double end = std::max(last.end(), s.end());
        last.duration = end - last.onset;
        continue;
      }
    }
    out.push_back(s);
  }
  SortRttm(&out);
  return out;
}

double TotalDuration(const RttmSegmentList &segments) {
  double total = 0.0;
  for (const auto &s : segments) total += s.duration;
  return total;
}

}  // namespace incar
