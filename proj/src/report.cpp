#include "pceks/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pceks/concrete_machine.hpp"
#include "pceks/flow_collapsed.hpp"
#include "pceks/singleton_mhp.hpp"
#include "pceks/soundness.hpp"

namespace pceks {

using Json = nlohmann::ordered_json;

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Explore: return "explore";
    case Mode::Analyze: return "analyze";
    case Mode::AnalyzeCounted: return "analyze-counted";
    case Mode::AnalyzeCollapsed: return "analyze-collapsed";
    case Mode::SoundnessCheck: return "soundness-check";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (Mode m : {Mode::Explore, Mode::Analyze, Mode::AnalyzeCounted, Mode::AnalyzeCollapsed,
                 Mode::SoundnessCheck})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

std::optional<TidStrategy> parse_tid(const std::string& s) {
  for (TidStrategy t : {TidStrategy::Global, TidStrategy::SiteHist, TidStrategy::SitePool})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (pool_n < 1) throw ConfigError("--pool-n must be at least 1");
  if (max_states < 1) throw ConfigError("--max-states must be at least 1");
  if (max_depth < 1) throw ConfigError("--max-depth must be at least 1");
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string span_of(const Program& p, Label l) {
  const SourceSpan& s = p.node(l).span;
  return std::to_string(s.line) + ":" + std::to_string(s.column);
}

void fill_flows(const Program& p, const std::set<FlowFact>& facts, AnalysisReport& r) {
  for (const auto& f : facts) r.flows.push_back({f.site, span_of(p, f.site), render(p, f.value)});
  // Values render canonically; order rows by label, then by text, so the
  // report does not depend on variant ordering.
  std::stable_sort(r.flows.begin(), r.flows.end(), [](const FlowRow& a, const FlowRow& b) {
    return a.site != b.site ? a.site < b.site : a.value < b.value;
  });
}

void fill_mhp(const Program& p, const std::set<LabelPair>& pairs, const std::set<Label>& self,
              AnalysisReport& r) {
  for (auto [a, b] : pairs) r.mhp.push_back({a, span_of(p, a), b, span_of(p, b)});
  for (Label l : self) r.self_mhp.push_back({l, span_of(p, l)});
}

void fill_dead(const Program& p, const std::set<DeadEnd>& dead, AnalysisReport& r) {
  for (const auto& d : dead) r.dead_ends.push_back({d.label, span_of(p, d.label), d.kind});
}

std::size_t edge_count(const std::vector<std::vector<std::size_t>>& succ) {
  std::size_t n = 0;
  for (const auto& s : succ) n += s.size();
  return n;
}

void run_explore(const Program& p, const RunConfig& c, AnalysisReport& r) {
  Exploration x = explore(p, c.max_states, c.max_depth);
  r.states = x.states.size();
  r.edges = x.edges.size();
  r.finals = x.finals().size();
  r.iterations = x.states.size();
  r.truncated = x.truncated;
  std::set<LabelPair> pairs;
  std::set<Label> self;
  for (const auto& s : x.states) {
    std::vector<Label> at;
    for (const auto& [t, ctx] : s.threads) at.push_back(ctx.expr);
    for (std::size_t i = 0; i < at.size(); ++i)
      for (std::size_t j = i + 1; j < at.size(); ++j) {
        if (at[i] == at[j])
          self.insert(at[i]);
        else
          pairs.emplace(std::min(at[i], at[j]), std::max(at[i], at[j]));
      }
  }
  fill_mhp(p, pairs, self, r);
  std::set<std::pair<Label, std::string>> stuck;
  for (const auto& s : x.stuck) stuck.emplace(s.label, s.reason);
  for (const auto& [l, why] : stuck) r.stuck.push_back({l, span_of(p, l), why});
}

SoundnessRow soundness_row(const SimulationResult& s) {
  SoundnessRow row;
  row.counted = s.counted;
  row.concrete_states = s.concrete_states;
  row.concrete_edges = s.concrete_edges;
  row.abstract_states = s.abstract_states;
  row.checked_pairs = s.checked_pairs;
  row.concrete_truncated = s.concrete_truncated;
  row.abstract_truncated = s.abstract_truncated;
  row.violations = s.violation_count;
  for (const auto& v : s.violations) row.counterexamples.push_back(v.description);
  return row;
}

}  // namespace

AnalysisReport run(const Program& p, const RunConfig& c) {
  c.validate();
  AnalysisReport r;
  r.input = c.input;
  r.digest = fnv1a_hex(p.source());
  r.labels = p.size();
  r.mode = c.mode;
  r.k = c.k;
  r.tid = c.tid;
  r.pool_n = c.pool_n;
  r.max_states = c.max_states;
  r.max_depth = c.max_depth;
  const Policy pol = c.policy();
  r.iteration_bound = iteration_bound(p, pol);

  auto start = std::chrono::steady_clock::now();
  switch (c.mode) {
    case Mode::Explore:
      run_explore(p, c, r);
      break;
    case Mode::Analyze: {
      StateSet s = reach(p, pol, c.max_states);
      r.states = s.states.size();
      r.edges = edge_count(s.successors);
      r.iterations = s.states.size();
      r.truncated = s.truncated;
      fill_flows(p, flows_to(p, s.states), r);
      fill_mhp(p, mhp_pairs(s), self_mhp(s), r);
      fill_dead(p, s.dead_ends, r);
      break;
    }
    case Mode::AnalyzeCounted: {
      CountedStateSet s = reach_counted(p, pol, c.max_states);
      r.states = s.states.size();
      r.edges = edge_count(s.successors);
      r.iterations = s.states.size();
      r.truncated = s.truncated;
      std::vector<AState> bases;
      for (const auto& cs : s.states) bases.push_back(cs.base);
      fill_flows(p, flows_to(p, bases), r);
      fill_mhp(p, mhp_pairs(s), self_mhp(s), r);
      fill_dead(p, s.dead_ends, r);
      break;
    }
    case Mode::AnalyzeCollapsed: {
      CollapsedState s = lfp_collapsed(p, pol);
      r.states = 1;
      r.iterations = s.passes();
      r.mhp_available = false;
      fill_flows(p, flows_to(p, s), r);
      fill_dead(p, s.dead_ends(), r);
      break;
    }
    case Mode::SoundnessCheck: {
      SimulationLimits lim;
      lim.max_states = c.max_states;
      lim.max_depth = c.max_depth;
      for (bool counted : {false, true}) {
        SimulationResult s = check_simulation(p, pol, counted, lim);
        r.soundness.push_back(soundness_row(s));
        r.sound = r.sound && s.ok();
        r.states = s.concrete_states;
        r.edges = s.concrete_edges;
        r.truncated = r.truncated || s.concrete_truncated;
      }
      break;
    }
  }
  if (c.timings)
    r.analysis_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

AnalysisReport run(const RunConfig& c) {
  c.validate();
  auto start = std::chrono::steady_clock::now();
  Program p = parse_file(c.input);
  double parse_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  AnalysisReport r = run(p, c);
  if (c.timings) r.parse_ms = parse_ms;
  return r;
}

// ---------------------------------------------------------------------------
// JSON.

namespace {

Json diag_json(const std::vector<DiagnosticRow>& rows) {
  Json a = Json::array();
  for (const auto& d : rows) a.push_back({{"label", d.label}, {"span", d.span}, {"kind", d.kind}});
  return a;
}

std::vector<DiagnosticRow> diag_from(const Json& a) {
  std::vector<DiagnosticRow> out;
  for (const auto& d : a)
    out.push_back({d.at("label").get<Label>(), d.at("span").get<std::string>(), d.at("kind").get<std::string>()});
  return out;
}

Json to_json(const AnalysisReport& r) {
  Json j;
  j["program"] = {{"input", r.input}, {"digest", r.digest}, {"labels", r.labels}};
  j["config"] = {{"mode", to_string(r.mode)},     {"k", r.k},
                 {"tid", to_string(r.tid)},       {"pool_n", r.pool_n},
                 {"max_states", r.max_states},    {"max_depth", r.max_depth}};
  j["metrics"] = {{"states", r.states},
                  {"edges", r.edges},
                  {"finals", r.finals},
                  {"iterations", r.iterations},
                  {"iteration_bound", r.iteration_bound},
                  {"truncated", r.truncated},
                  {"mhp_available", r.mhp_available}};
  Json flows = Json::array();
  for (const auto& f : r.flows) flows.push_back({{"site", f.site}, {"span", f.span}, {"value", f.value}});
  j["flows"] = std::move(flows);
  Json mhp = Json::array();
  for (const auto& m : r.mhp)
    mhp.push_back({{"first", m.first}, {"first_span", m.first_span}, {"second", m.second},
                   {"second_span", m.second_span}});
  j["mhp"] = std::move(mhp);
  Json self = Json::array();
  for (const auto& s : r.self_mhp) self.push_back({{"label", s.label}, {"span", s.span}});
  j["self_mhp"] = std::move(self);
  j["diagnostics"] = {{"dead_ends", diag_json(r.dead_ends)}, {"stuck", diag_json(r.stuck)}};
  Json checks = Json::array();
  for (const auto& s : r.soundness)
    checks.push_back({{"counted", s.counted},
                      {"concrete_states", s.concrete_states},
                      {"concrete_edges", s.concrete_edges},
                      {"abstract_states", s.abstract_states},
                      {"checked_pairs", s.checked_pairs},
                      {"concrete_truncated", s.concrete_truncated},
                      {"abstract_truncated", s.abstract_truncated},
                      {"violations", s.violations},
                      {"counterexamples", s.counterexamples}});
  j["soundness"] = {{"sound", r.sound}, {"checks", std::move(checks)}};
  if (r.parse_ms || r.analysis_ms)
    j["timings"] = {{"parse_ms", r.parse_ms ? Json(*r.parse_ms) : Json(nullptr)},
                    {"analysis_ms", r.analysis_ms ? Json(*r.analysis_ms) : Json(nullptr)}};
  else
    j["timings"] = nullptr;
  return j;
}

// Text tables: left-aligned columns padded to the widest cell.
std::string table(const std::vector<std::vector<std::string>>& rows) {
  if (rows.empty()) return "";
  std::vector<std::size_t> width;
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], row[i].size());
    }
  std::string out;
  for (const auto& row : rows) {
    std::string line = "  ";
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line += std::string(width[i] - row[i].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

std::string emit_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "program  " << r.input << "  digest " << r.digest << "  labels " << r.labels << "\n";
  os << "config   mode " << to_string(r.mode) << "  k " << r.k << "  tid " << to_string(r.tid)
     << "  pool-n " << r.pool_n << "  max-states " << r.max_states << "  max-depth " << r.max_depth << "\n";
  os << "metrics  states " << r.states << "  edges " << r.edges;
  if (r.mode == Mode::Explore) os << "  finals " << r.finals;
  os << "  iterations " << r.iterations << "  bound " << r.iteration_bound << "  truncated "
     << (r.truncated ? "yes" : "no") << "\n";
  if (r.parse_ms || r.analysis_ms)
    os << "timings  parse " << r.parse_ms.value_or(0) << " ms  analysis " << r.analysis_ms.value_or(0) << " ms\n";

  os << "\nflows (" << r.flows.size() << ")\n";
  {
    std::vector<std::vector<std::string>> rows{{"at", "fact"}};
    for (const auto& f : r.flows) rows.push_back({f.span, "(flows " + std::to_string(f.site) + " " + f.value + ")"});
    if (!r.flows.empty()) os << table(rows);
  }
  if (r.mhp_available) {
    os << "\nmhp (" << r.mhp.size() << ")\n";
    std::vector<std::vector<std::string>> rows{{"label", "at", "label", "at"}};
    for (const auto& m : r.mhp)
      rows.push_back({std::to_string(m.first), m.first_span, std::to_string(m.second), m.second_span});
    if (!r.mhp.empty()) os << table(rows);
    os << "\nself-mhp (" << r.self_mhp.size() << ")\n";
    std::vector<std::vector<std::string>> srows{{"label", "at"}};
    for (const auto& s : r.self_mhp) srows.push_back({std::to_string(s.label), s.span});
    if (!r.self_mhp.empty()) os << table(srows);
  } else {
    os << "\nmhp not available for the collapsed analysis\n";
  }
  for (const auto& [title, rows_in] : {std::pair{"dead-ends", &r.dead_ends}, std::pair{"stuck", &r.stuck}}) {
    os << "\n" << title << " (" << rows_in->size() << ")\n";
    std::vector<std::vector<std::string>> rows{{"label", "at", "kind"}};
    for (const auto& d : *rows_in) rows.push_back({std::to_string(d.label), d.span, d.kind});
    if (!rows_in->empty()) os << table(rows);
  }
  if (r.mode == Mode::SoundnessCheck) {
    os << "\nsoundness " << (r.sound ? "ok" : "FAILED") << "\n";
    std::vector<std::vector<std::string>> rows{
        {"analysis", "concrete", "edges", "abstract", "checked", "violations"}};
    for (const auto& s : r.soundness)
      rows.push_back({s.counted ? "counted" : "uncounted",
                      std::to_string(s.concrete_states) + (s.concrete_truncated ? "+" : ""),
                      std::to_string(s.concrete_edges),
                      std::to_string(s.abstract_states) + (s.abstract_truncated ? "+" : ""),
                      std::to_string(s.checked_pairs), std::to_string(s.violations)});
    os << table(rows);
    for (const auto& s : r.soundness)
      for (const auto& cx : s.counterexamples) os << "  " << cx << "\n";
  }
  return os.str();
}

}  // namespace

std::string emit(const AnalysisReport& r, Format format) {
  if (format == Format::Json) return to_json(r).dump(2) + "\n";
  return emit_text(r);
}

AnalysisReport report_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::runtime_error(std::string("malformed report: ") + e.what());
  }
  try {
    AnalysisReport r;
    const auto& prog = j.at("program");
    r.input = prog.at("input").get<std::string>();
    r.digest = prog.at("digest").get<std::string>();
    r.labels = prog.at("labels").get<std::size_t>();
    const auto& cfg = j.at("config");
    auto mode = parse_mode(cfg.at("mode").get<std::string>());
    auto tid = parse_tid(cfg.at("tid").get<std::string>());
    if (!mode || !tid) throw std::runtime_error("malformed report: unknown mode or tid strategy");
    r.mode = *mode;
    r.tid = *tid;
    r.k = cfg.at("k").get<std::size_t>();
    r.pool_n = cfg.at("pool_n").get<std::size_t>();
    r.max_states = cfg.at("max_states").get<std::size_t>();
    r.max_depth = cfg.at("max_depth").get<std::size_t>();
    const auto& m = j.at("metrics");
    r.states = m.at("states").get<std::size_t>();
    r.edges = m.at("edges").get<std::size_t>();
    r.finals = m.at("finals").get<std::size_t>();
    r.iterations = m.at("iterations").get<std::size_t>();
    r.iteration_bound = m.at("iteration_bound").get<std::uint64_t>();
    r.truncated = m.at("truncated").get<bool>();
    r.mhp_available = m.at("mhp_available").get<bool>();
    for (const auto& f : j.at("flows"))
      r.flows.push_back({f.at("site").get<Label>(), f.at("span").get<std::string>(), f.at("value").get<std::string>()});
    for (const auto& x : j.at("mhp"))
      r.mhp.push_back({x.at("first").get<Label>(), x.at("first_span").get<std::string>(),
                       x.at("second").get<Label>(), x.at("second_span").get<std::string>()});
    for (const auto& s : j.at("self_mhp"))
      r.self_mhp.push_back({s.at("label").get<Label>(), s.at("span").get<std::string>()});
    r.dead_ends = diag_from(j.at("diagnostics").at("dead_ends"));
    r.stuck = diag_from(j.at("diagnostics").at("stuck"));
    const auto& snd = j.at("soundness");
    r.sound = snd.at("sound").get<bool>();
    for (const auto& s : snd.at("checks")) {
      SoundnessRow row;
      row.counted = s.at("counted").get<bool>();
      row.concrete_states = s.at("concrete_states").get<std::size_t>();
      row.concrete_edges = s.at("concrete_edges").get<std::size_t>();
      row.abstract_states = s.at("abstract_states").get<std::size_t>();
      row.checked_pairs = s.at("checked_pairs").get<std::size_t>();
      row.concrete_truncated = s.at("concrete_truncated").get<bool>();
      row.abstract_truncated = s.at("abstract_truncated").get<bool>();
      row.violations = s.at("violations").get<std::size_t>();
      row.counterexamples = s.at("counterexamples").get<std::vector<std::string>>();
      r.soundness.push_back(std::move(row));
    }
    const auto& t = j.at("timings");
    if (!t.is_null()) {
      if (!t.at("parse_ms").is_null()) r.parse_ms = t.at("parse_ms").get<double>();
      if (!t.at("analysis_ms").is_null()) r.analysis_ms = t.at("analysis_ms").get<double>();
    }
    return r;
  } catch (const Json::exception& e) {
    throw std::runtime_error(std::string("malformed report: ") + e.what());
  }
}

}  // namespace pceks
