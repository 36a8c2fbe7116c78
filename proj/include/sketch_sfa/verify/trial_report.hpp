#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sketch_sfa/sq_core/cost_ledger.hpp"

namespace sketch_sfa::verify {

/// How `observed` is compared with `bound`.
enum class Comparator { AtMost, AtLeast, Above };

std::string to_string(Comparator c);

/// Outcome of one verification check. `pass` is always
/// `compare(observed, comparator, bound)`; `flagged` marks results whose
/// preconditions did not hold and which therefore say little either way.
struct TrialReport {
  std::string test_id;
  std::vector<std::uint64_t> seeds;
  double observed = 0.0;
  double bound = 0.0;
  Comparator comparator = Comparator::AtMost;
  bool pass = false;
  bool flagged = false;
  double runtime_seconds = 0.0;
  LedgerSnapshot ledger;
  std::vector<std::string> notes;
  nlohmann::json details = nlohmann::json::object();
};

bool compare(double observed, Comparator comparator, double bound);

TrialReport make_report(std::string test_id, std::vector<std::uint64_t> seeds, double observed, Comparator comparator,
                        double bound);

bool all_pass(const std::vector<TrialReport>& reports);

/// Runtime is wall-clock and the only field that is not reproducible, so it
/// is left out unless asked for.
nlohmann::json to_json(const TrialReport& r, bool with_runtime = false);

/// One JSON object per line.
void write_jsonl(std::ostream& out, const std::vector<TrialReport>& reports, bool with_runtime = false);
/// test_id, observed, comparator, bound, pass, flagged, seeds, entry_reads.
void write_summary_csv(std::ostream& out, const std::vector<TrialReport>& reports);
/// test_id, runtime_seconds.
void write_timing_csv(std::ostream& out, const std::vector<TrialReport>& reports);

/// "PASS"/"FAIL" line for terminals.
std::string summary_line(const TrialReport& r);

}  // namespace sketch_sfa::verify
