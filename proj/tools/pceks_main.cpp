// pceks: run the concrete explorer or one of the abstract analyses on a
// program and print a report.
//
// Exit status: 0 on success, 1 on a parse or configuration error, 2 when a
// soundness check finds a violation.

#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "pceks/concrete_machine.hpp"
#include "pceks/report.hpp"

int main(int argc, char** argv) {
  using namespace pceks;
  CLI::App app{"Concurrent CESK analyses: explore, analyze, soundness-check"};
  RunConfig cfg;
  std::string dot_path;

  const std::map<std::string, Mode> modes{{"explore", Mode::Explore},
                                          {"analyze", Mode::Analyze},
                                          {"analyze-counted", Mode::AnalyzeCounted},
                                          {"analyze-collapsed", Mode::AnalyzeCollapsed},
                                          {"soundness-check", Mode::SoundnessCheck}};
  const std::map<std::string, TidStrategy> tids{
      {"global", TidStrategy::Global}, {"site", TidStrategy::SiteHist}, {"pool", TidStrategy::SitePool}};
  const std::map<std::string, Format> formats{{"text", Format::Text}, {"json", Format::Json}};

  app.add_option("input", cfg.input, "Program file (.pceks)")->required();
  app.add_option("--mode", cfg.mode, "Analysis to run")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case))
      ->default_str("analyze-counted");
  app.add_option("--k", cfg.k, "History depth (context sensitivity)")->default_val(0);
  app.add_option("--tid", cfg.tid, "Abstract thread ids")
      ->transform(CLI::CheckedTransformer(tids, CLI::ignore_case))
      ->default_str("site");
  app.add_option("--pool-n", cfg.pool_n, "Pool size for --tid pool")->default_val(1);
  app.add_option("--max-states", cfg.max_states, "State bound")->default_val(10000);
  app.add_option("--max-depth", cfg.max_depth, "Depth bound for concrete exploration")->default_val(10000);
  app.add_option("--format", cfg.format, "Report format")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))
      ->default_str("text");
  app.add_option("--dot", dot_path, "Write the explored concrete state graph as Graphviz");
  app.add_flag("--timings", cfg.timings, "Include wall-clock timings in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    AnalysisReport r = run(cfg);
    std::cout << emit(r, cfg.format);
    if (!dot_path.empty()) {
      Program p = parse_file(cfg.input);
      std::ofstream out(dot_path);
      if (!out) throw ConfigError("cannot write " + dot_path);
      out << to_dot(p, explore(p, cfg.max_states, cfg.max_depth));
    }
    return r.sound ? 0 : 2;
  } catch (const ParseError& e) {
    std::cerr << cfg.input << ":" << e.line() << ":" << e.column() << ": " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ProgramError& e) {
    std::cerr << cfg.input << ": " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
