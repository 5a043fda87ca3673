#pragma once

// Periodicity report: per-period status with certificates, chaos verdict,
// and the Sharkovskii baseline. The exact oracle is the only authority for
// absence; a certificate claiming a period the oracle refutes is a bug and
// raises InconsistencyError.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "stardyn/certificates.hpp"

namespace stardyn {

enum class PeriodStatus { Present, Absent, Unknown };

std::string to_string(PeriodStatus s);

struct PeriodEntry {
  int period = 0;
  PeriodStatus status = PeriodStatus::Unknown;
  std::vector<Certificate> certificates;
};

struct PeriodicityReport {
  StarPattern pattern;
  int max_period = 0;
  int max_iterate = 0;
  std::vector<PeriodEntry> periods;  // periods[q-1] is period q
  std::optional<Genscramble> chaos;
  std::set<long long> forcing_baseline;
  std::optional<Theorem1Case> theorem1;
  std::optional<NPlus2Case> nplus2;
  std::optional<Cascade> cascade;
  // Depth the oracle completed; periods beyond it were not exhausted.
  int oracle_depth = 0;
  std::vector<std::string> notes;

  const PeriodEntry& at(int q) const { return periods.at(q - 1); }
  std::set<int> present() const;
  std::set<int> absent() const;
};

class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ReportOptions {
  int max_period = 10;
  int max_iterate = 2;
  OracleOptions oracle;
};

PeriodicityReport periodicity_report(const StarPattern& p, ReportOptions options = {});

nlohmann::ordered_json to_json(const PeriodicityReport& r);

}  // namespace stardyn
