#include "rai/scenario/config.hpp"

#include <fstream>
#include <set>

namespace rai::scenario {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path existing(const fs::path& base, const std::string& rel, const std::string& what) {
  fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base / rel;
  if (!fs::exists(p)) throw ConfigError(what + " not found: " + p.string());
  return p;
}

AgentType agent_type(const std::string& name) {
  for (auto t : {AgentType::kHri, AgentType::kControl, AgentType::kConversational, AgentType::kManipulator,
                 AgentType::kTractor, AgentType::kAnomaly}) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError("unknown agent type '" + name + "'");
}

}  // namespace

std::string_view to_string(AgentType type) {
  switch (type) {
    case AgentType::kHri: return "hri";
    case AgentType::kControl: return "control";
    case AgentType::kConversational: return "conversational";
    case AgentType::kManipulator: return "manipulator";
    case AgentType::kTractor: return "tractor";
    case AgentType::kAnomaly: return "anomaly";
  }
  return "?";
}

ScenarioConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  ScenarioConfig c;
  try {
    c.name = doc.value("name", "scenario");
    if (!doc.contains("world")) throw ConfigError("scenario needs a world file");
    c.world = existing(base_dir, doc.at("world").get<std::string>(), "world file");
    if (doc.contains("identity")) c.identity = existing(base_dir, doc.at("identity").get<std::string>(), "identity bundle");
    c.seed = doc.value("seed", std::uint64_t{0});
    c.max_ticks = doc.value("max_ticks", std::int64_t{1000});
    c.tick_ms = doc.value("tick_ms", std::int64_t{100});
    if (c.max_ticks < 1) throw ConfigError("max_ticks must be positive");
    if (c.tick_ms < 1) throw ConfigError("tick_ms must be positive");

    const json provider = doc.value("provider", json{{"type", "scripted"}});
    const std::string ptype = provider.value("type", "scripted");
    if (ptype == "scripted") {
      c.provider.type = ProviderSpec::Type::kScripted;
    } else if (ptype == "http") {
      c.provider.type = ProviderSpec::Type::kHttp;
      c.provider.base_url = provider.value("base_url", "");
      c.provider.model = provider.value("model", c.provider.model);
    } else {
      throw ConfigError("unknown provider type '" + ptype + "'");
    }

    std::set<std::string> ids;
    for (const auto& a : doc.value("agents", json::array())) {
      AgentSpec s;
      s.id = a.at("id").get<std::string>();
      if (!ids.insert(s.id).second) throw ConfigError("duplicate agent id '" + s.id + "'");
      s.type = agent_type(a.at("type").get<std::string>());
      s.period_ms = a.value("period_ms", c.tick_ms);
      if (s.period_ms < 1) throw ConfigError("agent " + s.id + ": period_ms must be positive");
      if (a.contains("script")) s.script = existing(base_dir, a["script"].get<std::string>(), "script for " + s.id);
      s.inbox = a.value("inbox", s.inbox);
      s.outbox = a.value("outbox", s.outbox);
      s.max_steps = a.value("max_steps", s.max_steps);
      if (s.max_steps < 1) throw ConfigError("agent " + s.id + ": max_steps must be at least 1");
      if (a.contains("self_image")) s.self_image = a["self_image"].get<std::string>();
      s.route = a.value("route", "");
      s.instructions = a.value("instructions", "");
      const bool llm = s.type != AgentType::kTractor;
      const bool needs_model = llm && s.type != AgentType::kControl;
      if (needs_model && c.provider.type == ProviderSpec::Type::kScripted && !s.script) {
        throw ConfigError("agent " + s.id + " needs a script for the scripted provider");
      }
      if (s.type == AgentType::kTractor && s.route.empty()) throw ConfigError("tractor " + s.id + " needs a route");
      if ((s.type == AgentType::kConversational || s.type == AgentType::kManipulator) && s.inbox == s.outbox) {
        throw ConfigError("agent " + s.id + ": inbox and outbox must differ");
      }
      c.agents.push_back(std::move(s));
    }

    for (const auto& m : doc.value("operator", json::array())) {
      OperatorMessage om;
      om.tick = m.at("tick").get<std::int64_t>();
      om.topic = m.value("topic", om.topic);
      om.text = m.at("text").get<std::string>();
      c.operator_messages.push_back(std::move(om));
    }
    for (const auto& o : doc.value("obstacles", json::array())) {
      ObstacleSpec os;
      os.kind = o.at("kind").get<std::string>();
      os.route = o.at("route").get<std::string>();
      os.segment = o.value("segment", std::size_t{0});
      os.fraction = o.value("fraction", 0.5);
      os.id = o.value("id", "");
      c.obstacles.push_back(std::move(os));
    }
    if (doc.contains("terminal")) {
      const json& t = doc["terminal"];
      if (t.contains("missions")) c.terminal.missions = t["missions"].get<int>();
      if (t.contains("turns")) c.terminal.turns = t["turns"].get<int>();
      c.terminal.tractor_done = t.value("tractor_done", false);
      c.terminal.world_halted = t.value("world_halted", false);
      c.terminal.grace_ticks = t.value("grace_ticks", 0);
    }
    c.checks = doc.value("checks", json::array());
    if (!c.checks.is_array()) throw ConfigError("checks must be a list");
    c.expect_script_exhaustion = doc.value("expect_script_exhaustion", false);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("scenario: ") + ex.what());
  }
  return c;
}

ScenarioConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& ex) {
    throw ConfigError(path.string() + ": " + ex.what());
  }
  ScenarioConfig c = parse_config(doc, path.parent_path());
  c.source = path;
  return c;
}

}  // namespace rai::scenario
