#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "rai/scenario/runner.hpp"

namespace {

std::atomic<bool> g_interrupt{false};

void on_signal(int) { g_interrupt = true; }

void print_checks(const std::vector<rai::scenario::CheckResult>& checks) {
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
    if (!c.diagnosis.empty()) std::cout << ": " << c.diagnosis;
    std::cout << '\n';
  }
}

int run(const std::string& scenario, const rai::scenario::RunOptions& options, bool as_json) {
  try {
    auto config = rai::scenario::load_config(scenario);
    auto report = rai::scenario::run_scenario(config, options);
    if (as_json) {
      std::cout << rai::scenario::to_json(report).dump(2) << '\n';
    } else {
      print_checks(report.checks);
      std::cout << "outcome " << report.outcome << " after " << report.ticks << " ticks";
      if (report.transcript_path) std::cout << ", transcript " << report.transcript_path->string();
      std::cout << '\n';
    }
    return report.exit_code;
  } catch (const rai::scenario::ConfigError& ex) {
    std::cerr << "config error: " << ex.what() << '\n';
    return rai::scenario::kExitConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run multi-agent scenarios against the simulated world"};
  app.require_subcommand(1);

  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string transcript;
  bool live = false;
  bool as_json = false;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario to its terminal condition and evaluate its checks");
  run_cmd->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "override the scenario seed");
  run_cmd->add_option("--transcript", transcript, "write the JSON-lines transcript here");
  run_cmd->add_flag("--live", live, "tick on the wall clock (10 ticks/s) instead of virtual time");
  run_cmd->add_flag("--json", as_json, "print the report as JSON");

  std::string serve_scenario;
  std::uint16_t port = 8080;
  std::string serve_transcript;
  auto* serve_cmd = app.add_subcommand("serve", "Run a scenario live and serve the operator WebSocket bridge");
  serve_cmd->add_option("--scenario", serve_scenario, "scenario file")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", port, "WebSocket port");
  serve_cmd->add_option("--transcript", serve_transcript, "write the transcript here on exit");

  std::string check_transcript;
  auto* check_cmd = app.add_subcommand("checkers", "Re-evaluate the checks recorded in a transcript");
  check_cmd->add_option("--transcript", check_transcript, "transcript file")->required();

  std::string hash_scenario;
  auto* hash_cmd = app.add_subcommand("hashes", "Print the world state hashes at ticks 10, 100 and terminal");
  hash_cmd->add_option("--scenario", hash_scenario, "scenario file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (*hash_cmd) {
    try {
      std::cout << nlohmann::json(rai::scenario::golden_hashes(rai::scenario::load_config(hash_scenario))).dump() << '\n';
      return 0;
    } catch (const rai::scenario::ConfigError& ex) {
      std::cerr << "config error: " << ex.what() << '\n';
      return rai::scenario::kExitConfigError;
    }
  }

  if (*run_cmd) {
    rai::scenario::RunOptions options;
    options.seed = seed;
    options.live = live;
    if (!transcript.empty()) options.transcript = transcript;
    if (live) {
      std::signal(SIGINT, on_signal);
      options.interrupt = &g_interrupt;
    }
    return run(scenario, options, as_json);
  }
  if (*serve_cmd) {
    rai::scenario::RunOptions options;
    options.live = true;
    options.bridge_port = port;
    options.ignore_terminal = true;
    options.max_ticks = std::numeric_limits<std::int64_t>::max();
    options.interrupt = &g_interrupt;
    if (!serve_transcript.empty()) options.transcript = serve_transcript;
    options.on_listening = [](std::uint16_t p) { std::cout << "bridge listening on ws://127.0.0.1:" << p << std::endl; };
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    try {
      return run(serve_scenario, options, false);
    } catch (const std::exception& ex) {
      std::cerr << "serve failed: " << ex.what() << '\n';
      return 1;
    }
  }
  try {
    auto checks = rai::scenario::run_checks(rai::scenario::read_transcript(check_transcript));
    print_checks(checks);
    return rai::scenario::all_passed(checks) ? rai::scenario::kExitPass : rai::scenario::kExitCheckFailure;
  } catch (const rai::scenario::TranscriptError& ex) {
    std::cerr << "transcript error: " << ex.what() << '\n';
    return rai::scenario::kExitConfigError;
  }
}
