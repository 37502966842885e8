// netqa command-line driver.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "netqa/netqa.hpp"

namespace {

struct Options {
  std::string config;
  unsigned threads = 0;
  std::string out;
};

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run(netqa::Stage stage, const Options& opt) {
  auto cfg = netqa::load_config(opt.config);
  if (!opt.out.empty()) cfg.output_dir = opt.out;
  const unsigned threads = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());

  auto result = netqa::run_pipeline(cfg, stage, threads);
  std::cout << result.text;
  if (stage == netqa::Stage::Validate) return 0;

  result.files.push_back({"run_metadata.json", netqa::report::dump_pretty({{"generated_at", utc_timestamp()},
                                                                          {"threads", threads},
                                                                          {"output_dir", cfg.output_dir},
                                                                          {"config", opt.config}})});
  netqa::report::write_outputs(result.files, cfg.output_dir);
  std::cout << "wrote " << result.files.size() << " files to " << cfg.output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netqa: spatial data quality comparison of two line networks"};
  app.require_subcommand(1);

  Options opt;
  const std::pair<const char*, const char*> commands[] = {
      {"validate", "check config, input files, rules and coordinate system; writes nothing"},
      {"density", "per-cell and per-polygon infrastructure density"},
      {"structure", "graph topology: components, dangling nodes, undershoots"},
      {"match", "segment matching in both directions"},
      {"tags", "attribute completeness"},
      {"autocorr", "global and local Moran's I of the per-cell metrics"},
      {"full", "all analyses"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--threads", opt.threads, "worker threads (default: all cores)")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "output directory (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    return run(*netqa::parse_stage(sub->get_name()), opt);
  } catch (const std::exception& e) {
    std::cerr << "netqa: " << e.what() << "\n";
    return 1;
  }
}
