#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rai/scenario/checks.hpp"
#include "rai/scenario/config.hpp"

namespace rai::scenario {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailure = 1;

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> max_ticks;
  std::optional<std::filesystem::path> transcript;
  // Wall-clock ticks (tick_ms apart) instead of virtual time.
  bool live = false;
  // Serve the operator bridge on this port (0 = ephemeral) while running.
  std::optional<std::uint16_t> bridge_port;
  // Keep running after the terminal condition until interrupted or
  // max_ticks; used when serving an interactive console.
  bool ignore_terminal = false;
  // Set from another thread to end the run early.
  const std::atomic<bool>* interrupt = nullptr;
  // Called with the bound port once the bridge is listening.
  std::function<void(std::uint16_t)> on_listening;
};

struct RunReport {
  // COMPLETED (terminal condition reached), TIMEOUT (max_ticks),
  // INTERRUPTED, or FAILED (a scripted provider ran out unexpectedly).
  std::string outcome;
  std::vector<CheckResult> checks;
  std::optional<std::filesystem::path> transcript_path;
  std::string transcript;
  std::int64_t ticks = 0;
  // World state hashes by label: "10", "100" (when reached) and "terminal".
  std::map<std::string, std::string> hashes;
  int exit_code = kExitCheckFailure;
};

// Builds world, identity bundle and agents from the config, drives the clock
// until the terminal condition (plus grace ticks) or max_ticks, writes the
// transcript and evaluates the checks. Throws ConfigError for problems found
// while building (unknown route, bad bundle, missing provider settings).
RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

nlohmann::json to_json(const RunReport& report);

// World state hashes at ticks 10, 100 and terminal. Scenarios that finish
// earlier are rerun past their terminal condition to reach those ticks.
std::map<std::string, std::string> golden_hashes(const ScenarioConfig& config);

}  // namespace rai::scenario
