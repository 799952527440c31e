#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rai::scenario {

inline constexpr int kExitConfigError = 2;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class AgentType { kHri, kControl, kConversational, kManipulator, kTractor, kAnomaly };

std::string_view to_string(AgentType type);

struct AgentSpec {
  std::string id;
  AgentType type = AgentType::kConversational;
  std::int64_t period_ms = 100;
  // Scripted provider fixture; resolved against the config's directory.
  std::optional<std::filesystem::path> script;
  std::string inbox = "hri/in";
  std::string outbox = "hri/out";
  int max_steps = 16;
  // Image asset shown in the first user turn (visual embodiment).
  std::optional<std::string> self_image;
  // Tractor: name of a route in the world file.
  std::string route;
  // Extra system prompt text appended after the identity prompt.
  std::string instructions;
};

struct ProviderSpec {
  enum class Type { kScripted, kHttp };
  Type type = Type::kScripted;
  // http only; base URL and key still come from RAI_LLM_BASE_URL and
  // RAI_LLM_API_KEY when unset here.
  std::string base_url;
  std::string model = "gpt-4o";
};

// Operator input injected after a given tick.
struct OperatorMessage {
  std::int64_t tick = 0;
  std::string topic = "hri/in";
  std::string text;
};

struct ObstacleSpec {
  std::string kind;
  std::string route;
  std::size_t segment = 0;
  double fraction = 0.5;
  std::string id;
};

// The run ends once every present condition holds.
struct TerminalSpec {
  std::optional<int> missions;   // terminal MissionRecords seen
  std::optional<int> turns;      // answered chat turns
  bool tractor_done = false;     // tractor reported completion or abort
  bool world_halted = false;
  // Ticks to keep running after the conditions first hold.
  int grace_ticks = 0;

  bool empty() const { return !missions && !turns && !tractor_done && !world_halted; }
};

struct ScenarioConfig {
  std::filesystem::path source;
  std::string name;
  std::filesystem::path world;
  std::optional<std::filesystem::path> identity;
  std::uint64_t seed = 0;
  std::int64_t max_ticks = 1000;
  std::int64_t tick_ms = 100;
  ProviderSpec provider;
  std::vector<AgentSpec> agents;
  std::vector<OperatorMessage> operator_messages;
  std::vector<ObstacleSpec> obstacles;
  TerminalSpec terminal;
  // Check documents, interpreted by the checks module.
  nlohmann::json checks = nlohmann::json::array();
  bool expect_script_exhaustion = false;
};

// Parses a scenario document; relative paths resolve against `base_dir`.
// Throws ConfigError on any problem, including missing files and duplicate
// agent ids.
ScenarioConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ScenarioConfig load_config(const std::filesystem::path& path);

}  // namespace rai::scenario
