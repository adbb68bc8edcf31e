#include <gtest/gtest.h>

#include "pceks/report.hpp"
#include "test_support.hpp"

namespace pceks {
namespace {

RunConfig config(const std::string& name, Mode mode) {
  RunConfig c;
  c.input = testing::corpus_path(name);
  c.mode = mode;
  return c;
}

TEST(Run, ExploreIdentity) {
  AnalysisReport r = run(config("p_id", Mode::Explore));
  EXPECT_EQ(r.finals, 1u);
  EXPECT_FALSE(r.truncated);
  EXPECT_EQ(r.states, 3u);
  EXPECT_TRUE(r.mhp.empty());
}

TEST(Run, AnalyzeSpawnJoin) {
  RunConfig c = config("p_spawnjoin", Mode::Analyze);
  c.format = Format::Json;
  AnalysisReport r = run(c);
  EXPECT_LE(r.iterations, r.iteration_bound);
  Program p = testing::load("p_spawnjoin");
  Label body = testing::find_label(p, "21");
  Label join = testing::find_label(p, "(join t)");
  bool pair = false;
  for (const auto& m : r.mhp) pair |= m.first == std::min(body, join) && m.second == std::max(body, join);
  EXPECT_TRUE(pair);
}

TEST(Run, CollapsedHasNoMhp) {
  AnalysisReport r = run(config("p_par", Mode::AnalyzeCollapsed));
  EXPECT_FALSE(r.mhp_available);
  EXPECT_TRUE(r.mhp.empty());
  EXPECT_FALSE(r.flows.empty());
  EXPECT_NE(emit(r, Format::Text).find("not available"), std::string::npos);
}

TEST(Run, SoundnessCheckPasses) {
  for (const auto& name : testing::corpus_names()) {
    AnalysisReport r = run(config(name, Mode::SoundnessCheck));
    EXPECT_TRUE(r.sound) << name;
    ASSERT_EQ(r.soundness.size(), 2u);
  }
}

TEST(Run, ConfigValidation) {
  RunConfig c = config("p_id", Mode::Analyze);
  c.pool_n = 0;
  EXPECT_THROW(run(c), ConfigError);
  c.pool_n = 1;
  c.max_states = 0;
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Emit, DeterministicAndRoundTrips) {
  for (Mode m : {Mode::Explore, Mode::Analyze, Mode::AnalyzeCounted, Mode::AnalyzeCollapsed, Mode::SoundnessCheck})
    for (const auto& name : testing::corpus_names()) {
      RunConfig c = config(name, m);
      std::string a = emit(run(c), Format::Json);
      AnalysisReport r = run(c);
      EXPECT_EQ(a, emit(r, Format::Json));
      EXPECT_EQ(emit(r, Format::Text), emit(run(c), Format::Text));
      EXPECT_EQ(report_from_json(a), r) << name << " " << to_string(m);
    }
}

TEST(Emit, TimingsRoundTrip) {
  RunConfig c = config("p_id", Mode::Analyze);
  c.timings = true;
  AnalysisReport r = run(c);
  ASSERT_TRUE(r.parse_ms.has_value());
  EXPECT_EQ(report_from_json(emit(r, Format::Json)), r);
}

TEST(Emit, EmptyFactsKeepEveryKey) {
  AnalysisReport r;
  std::string j = emit(r, Format::Json);
  for (const char* key : {"\"program\"", "\"config\"", "\"metrics\"", "\"flows\": []", "\"mhp\": []",
                          "\"self_mhp\": []", "\"dead_ends\": []", "\"stuck\": []", "\"soundness\"", "\"timings\": null"})
    EXPECT_NE(j.find(key), std::string::npos) << key;
  EXPECT_EQ(report_from_json(j), r);
}

TEST(Emit, MalformedJsonIsRejected) {
  EXPECT_THROW(report_from_json("{"), std::runtime_error);
  EXPECT_THROW(report_from_json("{}"), std::runtime_error);
}

TEST(Digest, Fnv1a) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

}  // namespace
}  // namespace pceks
