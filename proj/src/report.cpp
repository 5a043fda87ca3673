#include "stardyn/report.hpp"

#include "stardyn/forcing_orders.hpp"

namespace stardyn {

std::string to_string(PeriodStatus s)
{
  switch (s) {
    case PeriodStatus::Present: return "present";
    case PeriodStatus::Absent: return "absent";
    case PeriodStatus::Unknown: return "unknown";
  }
  return "unknown";
}

std::set<int> PeriodicityReport::present() const
{
  std::set<int> out;
  for (const auto& e : periods)
    if (e.status == PeriodStatus::Present)
      out.insert(e.period);
  return out;
}

std::set<int> PeriodicityReport::absent() const
{
  std::set<int> out;
  for (const auto& e : periods)
    if (e.status == PeriodStatus::Absent)
      out.insert(e.period);
  return out;
}

namespace {

// Deepest scan that fits under the cap, or nullopt when even depth 1 does not.
std::optional<PeriodScan> bounded_scan(const PLMap& m, int max_period, OracleOptions options)
{
  for (int depth = max_period; depth >= 1; --depth) {
    try {
      return scan_periodic_points(m, depth, options);
    } catch (const CapExceeded&) {
    }
  }
  return std::nullopt;
}

}  // namespace

PeriodicityReport periodicity_report(const StarPattern& p, ReportOptions options)
{
  if (options.max_period < 1 || options.max_iterate < 1)
    throw std::invalid_argument("max_period and max_iterate must be positive");
  const int k = p.orbit_size();
  const PLMap m = realize(p);

  PeriodicityReport r{p, options.max_period, options.max_iterate, {}, {}, {}, {}, {}, {}, 0, {}};
  const auto scan = bounded_scan(m, options.max_period, options.oracle);
  r.oracle_depth = scan ? scan->max_period : 0;

  r.theorem1 = check_center_theorem(p);
  if (nplus2_preconditions_hold(p))
    r.nplus2 = check_nplus2_theorem(p);
  const CoverDigraph g = cover_digraph(p);
  r.cascade = find_cascade(g);
  for (long long q : forced_periods(1, k, options.max_period))
    r.forcing_baseline.insert(q);

  std::vector<Certificate> structural;
  if (r.theorem1)
    structural.emplace_back(*r.theorem1);
  if (r.nplus2)
    structural.emplace_back(*r.nplus2);
  if (r.cascade)
    structural.emplace_back(CascadeCertificate{*r.cascade});
  structural.emplace_back(CenterOrbit{k});
  structural.emplace_back(ForcingBaseline{k});

  for (int q = 1; q <= options.max_period; ++q) {
    PeriodEntry e{q, PeriodStatus::Unknown, {}};
    for (const auto& c : structural)
      if (claims_period(c, q))
        e.certificates.push_back(c);

    if (q <= r.oracle_depth) {
      const auto& found = scan->witnesses[q];
      if (!found.empty()) {
        e.certificates.emplace_back(OracleWitness{found.front()});
      } else if (!e.certificates.empty()) {
        throw InconsistencyError("certificate " + kind(e.certificates.front()) + " claims period " +
                                 std::to_string(q) + " which the oracle refutes for " +
                                 to_string(p));
      } else {
        e.status = PeriodStatus::Absent;
        e.certificates.emplace_back(OracleAbsence{q, scan->cylinders[q]});
      }
    }
    if (e.status != PeriodStatus::Absent && !e.certificates.empty())
      e.status = PeriodStatus::Present;
    r.periods.push_back(std::move(e));
  }

  r.chaos = find_genscramble(p, options.max_iterate);
  if (r.chaos) {
    if (auto check = replay(p, *r.chaos); !check)
      throw InconsistencyError("chaos certificate fails replay: " + check.reason);
  }

  std::string loop_only;
  for (const auto& w : closed_walk_lengths(g, options.max_period))
    if (w.self_loop_only)
      loop_only += (loop_only.empty() ? "" : ",") + std::to_string(w.length);
  if (!loop_only.empty())
    r.notes.push_back("closed walks of length " + loop_only +
                      " in the covering digraph stay on self-looped intervals");
  if (!r.absent().empty())
    r.notes.push_back("absent periods refer to the canonical piecewise-linear realization");
  if (r.oracle_depth < options.max_period)
    r.notes.push_back("oracle cylinder cap reached at depth " + std::to_string(r.oracle_depth + 1));
  return r;
}

nlohmann::ordered_json to_json(const PeriodicityReport& r)
{
  nlohmann::ordered_json j;
  j["pattern"] = to_json(r.pattern);
  j["pattern_text"] = to_string(r.pattern);
  j["max_period"] = r.max_period;
  j["max_iterate"] = r.max_iterate;
  j["oracle_depth"] = r.oracle_depth;
  nlohmann::ordered_json periods = nlohmann::ordered_json::object();
  for (const auto& e : r.periods) {
    nlohmann::ordered_json entry;
    entry["status"] = to_string(e.status);
    entry["certs"] = nlohmann::ordered_json::array();
    for (const auto& c : e.certificates)
      entry["certs"].push_back(to_json(c));
    periods[std::to_string(e.period)] = std::move(entry);
  }
  j["periods"] = std::move(periods);
  nlohmann::ordered_json chaos;
  chaos["status"] = r.chaos ? "certified" : "not_found";
  chaos["cert"] = r.chaos ? to_json(Certificate{*r.chaos}) : nlohmann::ordered_json(nullptr);
  j["chaos"] = std::move(chaos);
  j["forcing_baseline"] = r.forcing_baseline;
  j["notes"] = r.notes;
  return j;
}

}  // namespace stardyn
