// report.h
// Copyright 2026 The incar Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
//
// Session reports: DER decomposition table and SI-SDR summaries.

#ifndef INCAR_REPORT_H_
#define INCAR_REPORT_H_

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "incar/der.h"

namespace incar {

struct DerRow {
  std::string system;
  DerReport der;
};

struct SiSdrSummary {
  std::string system;
  size_t count = 0;
  double mean_db = 0.0;
  double median_db = 0.0;
  double min_db = 0.0;
  double max_db = 0.0;
};

// Summary of the values; an empty list gives NaN statistics.
SiSdrSummary SummarizeSiSdr(const std::string &system, std::vector<double> values_db);

struct SessionReport {
  std::vector<DerRow> der;
  std::vector<SiSdrSummary> si_sdr;
};

// "MS FA SC DER" percentages with two decimals, single-space separated.
std::string FormatDerRow(const DerReport &der);

// Right-aligned columns; an empty session renders the headers only.
std::string RenderText(const SessionReport &report);

// Field order is fixed. Non-finite numbers are written as the strings
// "inf", "-inf" and "nan".
nlohmann::ordered_json ReportToJson(const SessionReport &report);

}  // namespace incar

#endif  // INCAR_REPORT_H_
