#include "stardyn/cli.hpp"

#include <cstdlib>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "stardyn/file_io.hpp"
#include "stardyn/forcing_orders.hpp"
#include "stardyn/report.hpp"
#include "stardyn/survey.hpp"

namespace stardyn::cli {

namespace {

// Raised for bad input that CLI11 cannot see (files, pattern text, env).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  std::string pattern_path;
  int max_period = 10;
  int max_iterate = 2;
  std::uint64_t cylinder_cap = kDefaultCylinderCap;
  std::string format;
  std::string out_path;
  unsigned jobs = 0;
  std::uint64_t seed = 1;
};

std::uint64_t cap_from_env(std::uint64_t fallback)
{
  const char* raw = std::getenv("STARDYN_CYLINDER_CAP");
  if (!raw || !*raw)
    return fallback;
  std::uint64_t v = 0;
  std::istringstream in(raw);
  if (!(in >> v) || !in.eof() || v == 0)
    throw UsageError(std::string("STARDYN_CYLINDER_CAP must be a positive integer, got '") + raw + "'");
  return v;
}

StarPattern load_single_pattern(const std::string& path)
{
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::runtime_error& e) {
    throw UsageError(e.what());
  }
  std::vector<StarPattern> ps;
  try {
    ps = parse_pattern_lines(text);
  } catch (const PatternError& e) {
    std::string msg = path + ": " + e.what();
    throw UsageError(msg);
  }
  if (ps.size() != 1)
    throw UsageError(path + ": expected exactly one pattern, found " + std::to_string(ps.size()));
  return ps.front();
}

std::string brace_list(const std::set<int>& s)
{
  std::string out;
  for (int q : s)
    out += (out.empty() ? "" : ",") + std::to_string(q);
  return "{" + out + "}";
}

std::string report_text(const PeriodicityReport& r)
{
  std::ostringstream o;
  o << "pattern: " << to_string(r.pattern) << "\n";
  o << "present: " << brace_list(r.present()) << "\n";
  o << "absent: " << brace_list(r.absent()) << "\n";
  std::set<int> unknown;
  for (const auto& e : r.periods)
    if (e.status == PeriodStatus::Unknown)
      unknown.insert(e.period);
  if (!unknown.empty())
    o << "unknown: " << brace_list(unknown) << "\n";
  if (r.chaos)
    o << "chaos: certified at t=" << r.chaos->t << " u=" << r.chaos->u << " v=" << r.chaos->v << "\n";
  else
    o << "chaos: not found up to t=" << r.max_iterate << "\n";
  for (const auto& n : r.notes)
    o << "note: " << n << "\n";
  return o.str();
}

std::string join(const std::set<long long>& s)
{
  std::string out;
  for (long long q : s)
    out += (out.empty() ? "" : " ") + std::to_string(q);
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  RunConfig cfg;
  CLI::App app{"Periods and chaos of star maps defined by the orbit of the center", "stardyn"};
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--pmax", cfg.max_period, "Largest period examined")->check(CLI::PositiveNumber);
  app.add_option("--max-iterate", cfg.max_iterate, "Largest iterate searched for chaos")
      ->check(CLI::PositiveNumber);
  app.add_option("--jobs", cfg.jobs, "Worker threads for surveys (0 = hardware)");
  app.add_option("--seed", cfg.seed, "Seed for sampled patterns");
  app.add_option("--out", cfg.out_path, "Write output to this file (atomically)");
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv", "dot", "text"}));
  std::uint64_t cap_flag = 0;
  app.add_option("--cylinder-cap", cap_flag, "Oracle cylinder cap (overrides STARDYN_CYLINDER_CAP)")
      ->check(CLI::PositiveNumber);

  auto* analyze = app.add_subcommand("analyze", "Periodicity report for one pattern");
  std::string dot_path, json_path;
  analyze->add_option("--pattern", cfg.pattern_path, "Pattern file")->required();
  analyze->add_option("--dot", dot_path, "Also write the covering digraph in DOT form");
  analyze->add_option("--json", json_path, "Also write the JSON report");

  auto* enumerate = app.add_subcommand("enumerate", "List patterns up to branch permutation");
  int en_n = 0, en_k = 0, sample = 0;
  bool all_branches = false;
  enumerate->add_option("--n", en_n, "Branches")->required()->check(CLI::Range(2, 64));
  enumerate->add_option("--k", en_k, "Orbit size")->required()->check(CLI::Range(2, 64));
  enumerate->add_flag("--all-branches", all_branches, "Only orbits meeting every branch");
  enumerate->add_option("--sample", sample, "Draw this many random patterns instead (uses --seed)")
      ->check(CLI::PositiveNumber);

  auto* survey = app.add_subcommand("survey", "Classify every all-branches pattern");
  int sv_n = 0, sv_k = 0;
  std::string filter = "none";
  survey->add_option("--n", sv_n, "Branches")->required()->check(CLI::Range(2, 64));
  survey->add_option("--k", sv_k, "Orbit size")->required()->check(CLI::Range(2, 64));
  survey->add_option("--filter", filter, "Restrict the classes")
      ->check(CLI::IsMember({"none", "theorem1-inapplicable"}));

  auto* orders = app.add_subcommand("orders", "Period-forcing orders");
  std::string relation = "shark";
  long long ot = 1, om = 0, ok = 0, segment = 0, bound = 100;
  orders->add_option("--relation", relation, "shark, baldwin or nod")
      ->check(CLI::IsMember({"shark", "baldwin", "nod"}));
  orders->add_option("--t", ot, "Order index (branch count for nod)")->check(CLI::PositiveNumber);
  auto* m_opt = orders->add_option("--m", om, "Forced period")->check(CLI::PositiveNumber);
  auto* k_opt = orders->add_option("--k", ok, "Forcing period")->check(CLI::PositiveNumber);
  auto* seg_opt = orders->add_option("--segment", segment, "Print every period forced by this one")
                      ->check(CLI::PositiveNumber);
  orders->add_option("--bound", bound, "Upper bound for --segment")->check(CLI::PositiveNumber);
  seg_opt->excludes(m_opt)->excludes(k_opt);

  auto* oracle = app.add_subcommand("oracle", "Exact periodic points of one period");
  int period = 0;
  oracle->add_option("--pattern", cfg.pattern_path, "Pattern file")->required();
  oracle->add_option("--period", period, "Least period")->required()->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify-paper", "Reproduce the published examples and counts");
  bool verify_json = false;
  verify->add_flag("--json", verify_json, "JSON report");

  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "stardyn: " << e.what() << "\n" << app.help();
    return kUsage;
  }

  std::ostringstream buf;
  int status = kOk;
  try {
    cfg.cylinder_cap = cap_flag ? cap_flag : cap_from_env(kDefaultCylinderCap);
    const OracleOptions oracle_options{cfg.cylinder_cap};
    const unsigned jobs = cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());

    if (analyze->parsed()) {
      const std::string format = cfg.format.empty() ? "json" : cfg.format;
      if (format == "csv")
        throw UsageError("analyze supports json, text and dot");
      const StarPattern p = load_single_pattern(cfg.pattern_path);
      const auto r = periodicity_report(p, {cfg.max_period, cfg.max_iterate, oracle_options});
      const std::string json = to_json(r).dump(2) + "\n";
      const std::string dot = to_dot(cover_digraph(p));
      if (format == "json")
        buf << json;
      else if (format == "dot")
        buf << dot;
      else
        buf << report_text(r);
      if (!dot_path.empty())
        write_file_atomic(dot_path, dot);
      if (!json_path.empty())
        write_file_atomic(json_path, json);
      if (r.oracle_depth < cfg.max_period) {
        err << "stardyn: oracle cylinder cap reached; periods above " << r.oracle_depth
            << " are unknown\n";
        status = kCap;
      }
    } else if (enumerate->parsed()) {
      const std::string format = cfg.format.empty() ? "text" : cfg.format;
      if (format != "text" && format != "json")
        throw UsageError("enumerate supports text and json");
      std::vector<StarPattern> ps;
      if (sample > 0) {
        std::mt19937_64 rng(cfg.seed);
        for (int i = 0; i < sample; ++i)
          ps.push_back(sample_pattern(en_n, en_k, all_branches, rng));
      } else {
        ps = enumerate_patterns(en_n, en_k, all_branches);
      }
      if (format == "text") {
        for (const auto& p : ps)
          buf << to_string(p) << "\n";
      } else {
        std::uint64_t raw = 0;
        auto list = nlohmann::ordered_json::array();
        for (const auto& p : ps) {
          raw += class_size(p);
          list.push_back(to_json(p));
        }
        nlohmann::ordered_json j;
        j["n"] = en_n;
        j["k"] = en_k;
        j["all_branches"] = all_branches;
        j["sampled"] = sample > 0;
        j["count"] = ps.size();
        if (sample == 0)
          j["raw_count"] = raw;
        j["patterns"] = std::move(list);
        buf << j.dump(2) << "\n";
      }
    } else if (survey->parsed()) {
      const std::string format = cfg.format.empty() ? "json" : cfg.format;
      if (format != "json" && format != "csv")
        throw UsageError("survey supports json and csv");
      SurveyOptions o;
      o.max_period = cfg.max_period;
      o.max_iterate = cfg.max_iterate;
      o.filter = filter == "theorem1-inapplicable" ? SurveyFilter::Theorem1Inapplicable : SurveyFilter::None;
      o.jobs = jobs;
      o.oracle = oracle_options;
      buf << render_table(classify_all(sv_n, sv_k, o), format == "csv" ? TableFormat::Csv : TableFormat::Json);
    } else if (orders->parsed()) {
      const std::string format = cfg.format.empty() ? "text" : cfg.format;
      if (format != "text" && format != "json")
        throw UsageError("orders supports text and json");
      if (relation == "shark")
        ot = 1;
      else if (relation == "baldwin" && ot < 2)
        throw UsageError("baldwin needs --t >= 2");
      if (segment > 0) {
        std::set<long long> forced;
        if (relation == "nod") {
          for (long long m = 1; m <= bound; ++m)
            if (nod_le(ot, m, segment))
              forced.insert(m);
        } else {
          forced = forced_periods(ot, segment, bound);
        }
        if (format == "text")
          buf << join(forced) << "\n";
        else
          buf << nlohmann::ordered_json{{"relation", relation}, {"t", ot}, {"segment", segment},
                                        {"bound", bound}, {"forced", forced}}
                     .dump()
              << "\n";
      } else {
        if (om == 0 || ok == 0)
          throw UsageError("orders needs --m and --k, or --segment");
        bool v = false;
        if (relation == "shark")
          v = sharkovskii_le(om, ok);
        else if (relation == "baldwin")
          v = baldwin_le(ot, om, ok);
        else
          v = nod_le(ot, om, ok);
        if (format == "text")
          buf << (v ? "true" : "false") << "\n";
        else
          buf << nlohmann::ordered_json{{"relation", relation}, {"t", ot}, {"m", om}, {"k", ok}, {"value", v}}
                     .dump()
              << "\n";
      }
    } else if (oracle->parsed()) {
      if (!cfg.format.empty() && cfg.format != "json")
        throw UsageError("oracle supports json only");
      const StarPattern p = load_single_pattern(cfg.pattern_path);
      auto list = nlohmann::ordered_json::array();
      for (const auto& w : periodic_points(realize(p), period, oracle_options))
        list.push_back(to_json(w));
      buf << list.dump(2) << "\n";
    } else if (verify->parsed()) {
      const bool json = verify_json || cfg.format == "json";
      const VerifyReport v = verify_paper(PaperGoldens::defaults(), jobs);
      buf << (json ? v.json().dump(2) + "\n" : v.text());
      if (!v.all_passed())
        status = kInconsistency;
    }
  } catch (const UsageError& e) {
    err << "stardyn: " << e.what() << "\n";
    return kUsage;
  } catch (const PatternError& e) {
    err << "stardyn: " << e.what() << "\n";
    return kUsage;
  } catch (const CapExceeded& e) {
    err << "stardyn: resource cap: " << e.what() << "\n";
    return kCap;
  } catch (const InconsistencyError& e) {
    err << "stardyn: inconsistency: " << e.what() << "\n";
    return kInconsistency;
  } catch (const std::invalid_argument& e) {
    err << "stardyn: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "stardyn: internal error: " << e.what() << "\n";
    return kInconsistency;
  }

  if (cfg.out_path.empty()) {
    out << buf.str();
  } else {
    try {
      write_file_atomic(cfg.out_path, buf.str());
    } catch (const std::runtime_error& e) {
      err << "stardyn: " << e.what() << "\n";
      return kUsage;
    }
  }
  return status;
}

}  // namespace stardyn::cli
