#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "itscf/bench/cases.hpp"

namespace itscf::bench {

// summary.csv: one row per (case, sweep point) with accuracy, per-class
// recall, wall time, speedup and work counters. All non-timing fields are
// pure functions of config + seeds.
std::string summary_csv(const std::vector<CaseReport>& reports);

// confusion_<case>_<S>.csv: raw 6x6 counts with class-name header row and
// column in HA..LC order.
std::string confusion_csv(const CaseReport& report);

// Full config echo + environment + seeds, with deterministic field order.
std::string run_info_json(const ExperimentConfig& cfg);

// Writes summary.csv, one confusion CSV per report, and run.json.
void emit_reports(const std::vector<CaseReport>& reports, const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir);

} // namespace itscf::bench
