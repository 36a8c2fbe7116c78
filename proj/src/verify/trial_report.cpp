#include "sketch_sfa/verify/trial_report.hpp"

#include <ostream>
#include <sstream>

#include "sketch_sfa/sq_core/io.hpp"

namespace sketch_sfa::verify {

std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::AtMost:
      return "<=";
    case Comparator::AtLeast:
      return ">=";
    case Comparator::Above:
      return ">";
  }
  return "?";
}

bool compare(double observed, Comparator comparator, double bound) {
  switch (comparator) {
    case Comparator::AtMost:
      return observed <= bound;
    case Comparator::AtLeast:
      return observed >= bound;
    case Comparator::Above:
      return observed > bound;
  }
  return false;
}

TrialReport make_report(std::string test_id, std::vector<std::uint64_t> seeds, double observed, Comparator comparator,
                        double bound) {
  TrialReport r;
  r.test_id = std::move(test_id);
  r.seeds = std::move(seeds);
  r.observed = observed;
  r.comparator = comparator;
  r.bound = bound;
  r.pass = compare(observed, comparator, bound);
  return r;
}

bool all_pass(const std::vector<TrialReport>& reports) {
  for (const auto& r : reports) {
    if (!r.pass) return false;
  }
  return true;
}

nlohmann::json to_json(const TrialReport& r, bool with_runtime) {
  nlohmann::json j = {{"test_id", r.test_id},
                      {"seeds", r.seeds},
                      {"observed", r.observed},
                      {"comparator", to_string(r.comparator)},
                      {"bound", r.bound},
                      {"pass", r.pass},
                      {"flagged", r.flagged},
                      {"ledger", r.ledger},
                      {"notes", r.notes},
                      {"details", r.details}};
  if (with_runtime) j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

void write_jsonl(std::ostream& out, const std::vector<TrialReport>& reports, bool with_runtime) {
  for (const auto& r : reports) out << to_json(r, with_runtime).dump() << '\n';
}

void write_summary_csv(std::ostream& out, const std::vector<TrialReport>& reports) {
  out << "test_id,observed,comparator,bound,pass,flagged,seeds,entry_reads\n";
  for (const auto& r : reports) {
    out << r.test_id << ',' << format_double(r.observed) << ',' << to_string(r.comparator) << ','
        << format_double(r.bound) << ',' << (r.pass ? 1 : 0) << ',' << (r.flagged ? 1 : 0) << ',' << r.seeds.size()
        << ',' << r.ledger.entry_reads << '\n';
  }
}

void write_timing_csv(std::ostream& out, const std::vector<TrialReport>& reports) {
  out << "test_id,runtime_seconds\n";
  for (const auto& r : reports) out << r.test_id << ',' << format_double(r.runtime_seconds) << '\n';
}

std::string summary_line(const TrialReport& r) {
  std::ostringstream s;
  s << (r.pass ? "PASS " : "FAIL ") << r.test_id << ": observed " << r.observed << ' ' << to_string(r.comparator) << ' '
    << r.bound;
  if (r.flagged) s << " [flagged]";
  return s.str();
}

}  // namespace sketch_sfa::verify
