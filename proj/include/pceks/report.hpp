#pragma once

// Batch driver behind the command-line tool: one configuration in, one
// report out, rendered as aligned text or as JSON with a fixed key order.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pceks/abstract_domain.hpp"

namespace pceks {

enum class Mode : std::uint8_t { Explore, Analyze, AnalyzeCounted, AnalyzeCollapsed, SoundnessCheck };
enum class Format : std::uint8_t { Text, Json };

const char* to_string(Mode m);
std::optional<Mode> parse_mode(const std::string& s);
std::optional<TidStrategy> parse_tid(const std::string& s);

/// Invalid configuration values (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Mode mode = Mode::AnalyzeCounted;
  std::size_t k = 0;
  TidStrategy tid = TidStrategy::SiteHist;
  std::size_t pool_n = 1;
  std::size_t max_states = 10000;
  std::size_t max_depth = 10000;
  Format format = Format::Text;
  std::string input;
  bool timings = false;

  /// Throws ConfigError when pool_n or a bound is zero.
  void validate() const;
  Policy policy() const { return Policy{k, tid, pool_n}; }
};

struct FlowRow {
  Label site = 0;
  std::string span;   // "line:column"
  std::string value;  // canonical rendering of the abstract value
  bool operator==(const FlowRow&) const = default;
};

struct MhpRow {
  Label first = 0;
  std::string first_span;
  Label second = 0;
  std::string second_span;
  bool operator==(const MhpRow&) const = default;
};

struct SelfMhpRow {
  Label label = 0;
  std::string span;
  bool operator==(const SelfMhpRow&) const = default;
};

/// A dead end of the abstract analysis, or a stuck concrete thread.
struct DiagnosticRow {
  Label label = 0;
  std::string span;
  std::string kind;
  bool operator==(const DiagnosticRow&) const = default;
};

struct SoundnessRow {
  bool counted = false;
  std::size_t concrete_states = 0;
  std::size_t concrete_edges = 0;
  std::size_t abstract_states = 0;
  std::size_t checked_pairs = 0;
  bool concrete_truncated = false;
  bool abstract_truncated = false;
  std::size_t violations = 0;
  std::vector<std::string> counterexamples;
  bool operator==(const SoundnessRow&) const = default;
};

struct AnalysisReport {
  // program
  std::string input;
  std::string digest;  // FNV-1a 64 of the source text, hex
  std::size_t labels = 0;
  // config echo
  Mode mode = Mode::AnalyzeCounted;
  std::size_t k = 0;
  TidStrategy tid = TidStrategy::SiteHist;
  std::size_t pool_n = 1;
  std::size_t max_states = 0;
  std::size_t max_depth = 0;
  // metrics
  std::size_t states = 0;
  std::size_t edges = 0;
  std::size_t finals = 0;  // explore only
  std::size_t iterations = 0;
  std::uint64_t iteration_bound = 0;
  bool truncated = false;
  bool mhp_available = true;  // false for the collapsed analysis
  // facts, each sorted by label
  std::vector<FlowRow> flows;
  std::vector<MhpRow> mhp;
  std::vector<SelfMhpRow> self_mhp;
  std::vector<DiagnosticRow> dead_ends;
  std::vector<DiagnosticRow> stuck;
  std::vector<SoundnessRow> soundness;
  bool sound = true;
  // wall-clock milliseconds, present only when requested
  std::optional<double> parse_ms;
  std::optional<double> analysis_ms;

  bool operator==(const AnalysisReport&) const = default;
};

std::string fnv1a_hex(const std::string& text);

AnalysisReport run(const Program& p, const RunConfig& config);
/// Reads and parses config.input, then runs. Throws ParseError or ConfigError.
AnalysisReport run(const RunConfig& config);

std::string emit(const AnalysisReport& r, Format format);
/// Inverse of emit(r, Format::Json). Throws std::runtime_error on malformed input.
AnalysisReport report_from_json(const std::string& text);

}  // namespace pceks
