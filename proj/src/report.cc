// report.cc
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "incar/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace incar {

namespace {

std::string Fixed2(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

nlohmann::ordered_json Number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

// Columns joined by single spaces; the first column is left-aligned.
std::string Table(const std::vector<std::vector<std::string>> &rows) {
  std::vector<size_t> width;
  for (const auto &r : rows)
    for (size_t c = 0; c < r.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], r[c].size());
    }
  std::ostringstream os;
  for (const auto &r : rows) {
    std::string line;
    for (size_t c = 0; c < r.size(); ++c) {
      const std::string pad(width[c] - r[c].size(), ' ');
      if (c > 0) line += ' ';
      line += c == 0 ? r[c] + pad : pad + r[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
  return os.str();
}

}  // namespace

SiSdrSummary SummarizeSiSdr(const std::string &system, std::vector<double> values) {
  SiSdrSummary s;
  s.system = system;
  s.count = values.size();
  if (values.empty()) {
    s.mean_db = s.median_db = s.min_db = s.max_db = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  std::sort(values.begin(), values.end());
  s.mean_db = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  const size_t mid = values.size() / 2;
  s.median_db = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  s.min_db = values.front();
  s.max_db = values.back();
  return s;
}

std::string FormatDerRow(const DerReport &der) {
  return Fixed2(der.missed_pct) + " " + Fixed2(der.false_alarm_pct) + " " +
         Fixed2(der.confusion_pct) + " " + Fixed2(der.der_pct);
}

std::string RenderText(const SessionReport &report) {
  std::vector<std::vector<std::string>> der{{"system", "MS", "FA", "SC", "DER"}};
  for (const auto &r : report.der)
    der.push_back({r.system, Fixed2(r.der.missed_pct), Fixed2(r.der.false_alarm_pct),
                   Fixed2(r.der.confusion_pct), Fixed2(r.der.der_pct)});
  std::vector<std::vector<std::string>> sdr{
      {"system", "count", "mean", "median", "min", "max"}};
  for (const auto &s : report.si_sdr)
    sdr.push_back({s.system, std::to_string(s.count), Fixed2(s.mean_db), Fixed2(s.median_db),
                   Fixed2(s.min_db), Fixed2(s.max_db)});
  return "Diarization (%)\n" + Table(der) + "\nSI-SDR (dB)\n" + Table(sdr);
}

nlohmann::ordered_json ReportToJson(const SessionReport &report) {
  nlohmann::ordered_json j;
  j["der"] = nlohmann::ordered_json::array();
  for (const auto &r : report.der) {
    nlohmann::ordered_json row;
    row["system"] = r.system;
    row["reference_seconds"] = r.der.reference_seconds;
    row["missed_seconds"] = r.der.missed_seconds;
    row["false_alarm_seconds"] = r.der.false_alarm_seconds;
    row["confusion_seconds"] = r.der.confusion_seconds;
    row["missed_pct"] = r.der.missed_pct;
    row["false_alarm_pct"] = r.der.false_alarm_pct;
    row["confusion_pct"] = r.der.confusion_pct;
    row["der_pct"] = r.der.der_pct;
    nlohmann::ordered_json map = nlohmann::ordered_json::object();
    for (const auto &[rec, m] : r.der.speaker_map) {
      nlohmann::ordered_json inner = nlohmann::ordered_json::object();
      for (const auto &[hyp, ref] : m) inner[hyp] = ref;
      map[rec] = inner;
    }
    row["speaker_map"] = map;
    j["der"].push_back(row);
  }
  j["si_sdr"] = nlohmann::ordered_json::array();
  for (const auto &s : report.si_sdr) {
    nlohmann::ordered_json row;
    row["system"] = s.system;
    row["count"] = s.count;
    row["mean_db"] = Number(s.mean_db);
    row["median_db"] = Number(s.median_db);
    row["min_db"] = Number(s.min_db);
    row["max_db"] = Number(s.max_db);
    j["si_sdr"].push_back(row);
  }
  return j;
}

}  // namespace incar
