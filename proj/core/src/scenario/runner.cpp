#include "rai/scenario/runner.hpp"

#include <algorithm>

#include "rai/agents/anomaly_agent.hpp"
#include "rai/agents/control_agent.hpp"
#include "rai/agents/conversational.hpp"
#include "rai/agents/hri_agent.hpp"
#include "rai/agents/manipulation_tools.hpp"
#include "rai/agents/tractor.hpp"
#include "rai/llm/hash_embedder.hpp"
#include "rai/llm/http_provider.hpp"
#include "rai/llm/scripted.hpp"
#include "rai/msgbus/bridge.hpp"
#include "rai/sim/orchard.hpp"
#include "rai/sim/sim_node.hpp"
#include "rai/sim/world_io.hpp"
#include "rai/toolkit/builtin.hpp"
#include "rai/whoami/bundle.hpp"

namespace rai::scenario {

using nlohmann::json;
namespace mb = rai::msgbus;

namespace {

json envelope_record(const mb::Envelope& e) {
  json j{{"topic", e.topic}, {"id", e.id}};
  if (e.corr) j["corr"] = *e.corr;
  j["payload"] = e.payload;
  return j;
}

struct Progress {
  int terminal_missions = 0;
  int turns = 0;
  bool tractor_done = false;
  std::optional<std::int64_t> terminal_tick;
};

bool satisfied(const TerminalSpec& t, const Progress& p, bool halted) {
  if (t.empty()) return false;
  if (t.missions && p.terminal_missions < *t.missions) return false;
  if (t.turns && p.turns < *t.turns) return false;
  if (t.tractor_done && !p.tractor_done) return false;
  if (t.world_halted && !halted) return false;
  return true;
}

class Builder {
 public:
  Builder(const ScenarioConfig& config, mb::Bus& bus, std::shared_ptr<const whoami::IdentityBundle> bundle,
          const sim::WorldState& world)
      : config_(config), bus_(bus), bundle_(std::move(bundle)), world_(world) {}

  std::unique_ptr<agents::Agent> build(const AgentSpec& spec) {
    switch (spec.type) {
      case AgentType::kHri:
      case AgentType::kConversational:
      case AgentType::kManipulator: {
        agents::ConversationalConfig c;
        c.system_prompt = system_prompt(spec);
        c.provider = provider(spec);
        c.max_steps = spec.max_steps;
        c.params.model = config_.provider.model;
        c.inbox_topic = spec.inbox;
        c.outbox_topic = spec.outbox;
        c.condition = condition(spec);
        c.identity = bundle_;
        if (spec.type == AgentType::kHri) {
          c.tools = std::make_shared<toolkit::ToolRegistry>(agents::hri_registry());
          return std::make_unique<agents::HriAgent>(spec.id, bus_, spec.period_ms, std::move(c));
        }
        c.tools = std::make_shared<toolkit::ToolRegistry>(spec.type == AgentType::kManipulator
                                                              ? agents::manipulation_registry()
                                                              : toolkit::builtin_registry());
        return std::make_unique<agents::ConversationalAgent>(spec.id, bus_, spec.period_ms, std::move(c));
      }
      case AgentType::kControl: {
        agents::ControlConfig c;
        if (spec.script || config_.provider.type == ProviderSpec::Type::kHttp) c.planner = provider(spec);
        c.planner_prompt = system_prompt(spec);
        c.max_steps = spec.max_steps;
        c.params.model = config_.provider.model;
        c.identity = bundle_;
        return std::make_unique<agents::ControlAgent>(spec.id, bus_, spec.period_ms, std::move(c));
      }
      case AgentType::kTractor: {
        auto route = world_.routes.find(spec.route);
        if (route == world_.routes.end()) throw ConfigError("tractor " + spec.id + ": unknown route " + spec.route);
        agents::TractorConfig c;
        for (const auto& p : route->second) c.route.push_back({p.x, p.y});
        return std::make_unique<agents::TractorAgent>(spec.id, bus_, spec.period_ms, std::move(c));
      }
      case AgentType::kAnomaly: {
        agents::AnomalyConfig c;
        c.system_prompt = system_prompt(spec);
        c.provider = provider(spec);
        c.max_steps = spec.max_steps;
        c.params.model = config_.provider.model;
        c.condition = condition(spec);
        c.identity = bundle_;
        return std::make_unique<agents::AnomalyAgent>(spec.id, bus_, spec.period_ms, std::move(c));
      }
    }
    throw ConfigError("unsupported agent type");
  }

  // Scripted providers, by agent id, for reporting leftovers.
  const std::map<std::string, std::shared_ptr<llm::ScriptedProvider>>& scripts() const { return scripts_; }

 private:
  std::string system_prompt(const AgentSpec& spec) const {
    std::string prompt = bundle_ ? whoami::build_system_prompt(*bundle_) : std::string();
    if (!spec.instructions.empty()) prompt += (prompt.empty() ? "" : "\n\n") + spec.instructions;
    return prompt;
  }

  whoami::EmbodimentCondition condition(const AgentSpec& spec) const {
    if (!spec.self_image) return whoami::language_only();
    if (!bundle_) throw ConfigError("agent " + spec.id + " uses a self image but no identity bundle is set");
    try {
      return whoami::attach_self_image(*bundle_, *spec.self_image);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError("agent " + spec.id + ": " + ex.what());
    }
  }

  std::shared_ptr<llm::ChatProvider> provider(const AgentSpec& spec) {
    if (config_.provider.type == ProviderSpec::Type::kScripted) {
      if (!spec.script) throw ConfigError("agent " + spec.id + " has no script");
      try {
        std::shared_ptr<llm::ScriptedProvider> p = llm::ScriptedProvider::from_file(*spec.script);
        scripts_[spec.id] = p;
        return p;
      } catch (const std::exception& ex) {
        throw ConfigError("script for " + spec.id + ": " + ex.what());
      }
    }
    llm::HttpConfig http;
    try {
      http = llm::HttpConfig::from_env();
    } catch (const std::invalid_argument&) {
      if (config_.provider.base_url.empty()) throw ConfigError("http provider needs RAI_LLM_BASE_URL or base_url");
    }
    if (!config_.provider.base_url.empty()) http.base_url = config_.provider.base_url;
    http.model = config_.provider.model;
    auto bundle = bundle_;
    return std::make_shared<llm::HttpProvider>(http, [bundle](const std::string& id) -> std::optional<llm::ImageData> {
      if (!bundle) return std::nullopt;
      return whoami::load_image(*bundle, id);
    });
  }

  const ScenarioConfig& config_;
  mb::Bus& bus_;
  std::shared_ptr<const whoami::IdentityBundle> bundle_;
  const sim::WorldState& world_;
  std::map<std::string, std::shared_ptr<llm::ScriptedProvider>> scripts_;
};

}  // namespace

RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const std::uint64_t seed = options.seed.value_or(config.seed);
  const std::int64_t max_ticks = options.max_ticks.value_or(config.max_ticks);

  sim::WorldState initial;
  try {
    initial = sim::load_world(config.world);
  } catch (const std::exception& ex) {
    throw ConfigError(ex.what());
  }
  sim::World world_model;
  try {
    world_model = sim::World(initial);
    for (const auto& o : config.obstacles) sim::spawn_obstacle(world_model, o.kind, o.route, o.segment, o.fraction, o.id);
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("world: ") + ex.what());
  }
  initial = world_model.state();

  std::shared_ptr<const whoami::IdentityBundle> bundle;
  if (config.identity) {
    try {
      bundle = std::make_shared<const whoami::IdentityBundle>(
          whoami::IdentityBundle::load(*config.identity, std::make_shared<llm::HashEmbedder>()));
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("identity bundle: ") + ex.what());
    }
  }

  mb::EventLoop loop(options.live ? mb::EventLoop::Mode::kRealtime : mb::EventLoop::Mode::kVirtual);
  mb::Bus bus(loop, seed);
  bus.add_alias("world/anomalies", agents::topics::kAnomalyEvents);

  sim::SimNode node(bus, std::move(world_model), {config.tick_ms, 10});
  Transcript transcript([&node] { return node.world().tick(); });

  json checks = config.checks;
  transcript.record("runner", "scenario_start",
                    {{"name", config.name},
                     {"seed", seed},
                     {"max_ticks", max_ticks},
                     {"agents", [&] {
                        json a = json::array();
                        for (const auto& s : config.agents) a.push_back({{"id", s.id}, {"type", to_string(s.type)}});
                        return a;
                      }()},
                     {"checks", checks},
                     {"has_terminal", !config.terminal.empty() && !options.ignore_terminal},
                     {"expect_script_exhaustion", config.expect_script_exhaustion},
                     {"initial_state", sim::to_json(initial)}});

  Progress progress;
  auto bus_tap = bus.add_tap([&](const mb::Envelope& e) {
    transcript.record("bus", std::string(mb::to_string(e.kind)), envelope_record(e));
    if (e.kind != mb::Kind::kPub) return;
    if (e.topic == agents::topics::kMissionStatus) {
      const auto s = e.payload.value("status", "");
      if (s == "SUCCEEDED" || s == "FAILED") ++progress.terminal_missions;
    } else if (e.topic == agents::topics::kTractorStatus) {
      const auto ev = e.payload.value("event", "");
      if (ev == "route_completed" || ev == "aborted" || ev == "nav_failed") progress.tractor_done = true;
    }
  });
  node.on_event([&](const sim::WorldEvent& e) { transcript.record("world", e.kind, e.detail); });

  RunReport report;
  const bool use_terminal = !config.terminal.empty() && !options.ignore_terminal;
  bool done = false;
  node.on_tick([&](const sim::World& w) {
    const auto tick = w.tick();
    for (const auto& m : config.operator_messages) {
      if (m.tick == tick) {
        transcript.record("operator", "message", {{"topic", m.topic}, {"text", m.text}});
        bus.publish(m.topic, json{{"text", m.text}});
      }
    }
    if (tick == 10 || tick == 100) report.hashes[std::to_string(tick)] = sim::state_hash(w.state());
    if (use_terminal && !progress.terminal_tick && satisfied(config.terminal, progress, w.state().halted)) {
      progress.terminal_tick = tick;
      transcript.record("runner", "terminal", {{"tick", tick}});
    }
    if (progress.terminal_tick && tick >= *progress.terminal_tick + config.terminal.grace_ticks) done = true;
    if (tick >= max_ticks) done = true;
  });

  Builder builder(config, bus, bundle, initial);
  agents::AgentRuntime runtime;
  for (const auto& spec : config.agents) {
    auto& agent = runtime.add(builder.build(spec));
    agent.set_trace([&](const std::string& source, const std::string& kind, const json& payload) {
      if (kind == "turn") ++progress.turns;
      transcript.record(source, kind, payload);
    });
  }

  std::unique_ptr<mb::BridgeServer> bridge;
  if (options.bridge_port) {
    mb::BridgeOptions bo;
    bo.ws_port = *options.bridge_port;
    bridge = std::make_unique<mb::BridgeServer>(bus, bo);
    bridge->start();
    if (options.on_listening) options.on_listening(bridge->ws_port());
  }

  node.start();
  runtime.run_all();
  bool interrupted = false;
  loop.run_until([&] {
    if (options.interrupt != nullptr && options.interrupt->load()) interrupted = true;
    return done || interrupted;
  });
  node.stop();
  runtime.stop_all();
  msgbus::Millis longest = 0;
  for (const auto& a : runtime.agents()) longest = std::max(longest, a->period_ms());
  loop.run_until([&] { return runtime.all_stopped(); }, loop.now_ms() + longest + 1);
  if (bridge) bridge->stop();

  const auto& final_state = node.world().state();
  report.ticks = final_state.tick;
  report.hashes["terminal"] = sim::state_hash(final_state);

  bool exhausted = false;
  for (const auto& e : transcript.events()) {
    if (e.kind == "model_error" && e.payload.value("type", "") == "ScriptExhausted") exhausted = true;
  }
  if (interrupted) {
    report.outcome = "INTERRUPTED";
  } else if (exhausted && !config.expect_script_exhaustion) {
    report.outcome = "FAILED";
  } else {
    report.outcome = progress.terminal_tick ? "COMPLETED" : "TIMEOUT";
  }

  json leftovers = json::object();
  for (const auto& [id, p] : builder.scripts()) leftovers[id] = p->remaining();
  transcript.record("runner", "scenario_end",
                    {{"outcome", report.outcome},
                     {"terminal_reached", progress.terminal_tick.has_value()},
                     {"hashes", report.hashes},
                     {"script_remaining", leftovers},
                     {"final_state", sim::to_json(final_state)}});

  report.transcript = transcript.to_jsonl();
  if (options.transcript) {
    transcript.write(*options.transcript);
    report.transcript_path = options.transcript;
  }
  report.checks = run_checks(transcript.events());
  report.exit_code = all_passed(report.checks) ? kExitPass : kExitCheckFailure;
  return report;
}

json to_json(const RunReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  json j{{"outcome", r.outcome}, {"ticks", r.ticks}, {"hashes", r.hashes}, {"checks", checks}, {"exit_code", r.exit_code}};
  if (r.transcript_path) j["transcript"] = r.transcript_path->string();
  return j;
}

std::map<std::string, std::string> golden_hashes(const ScenarioConfig& config) {
  auto hashes = run_scenario(config).hashes;
  if (!hashes.count("10") || !hashes.count("100")) {
    RunOptions extended;
    extended.ignore_terminal = true;
    extended.max_ticks = 100;
    const auto more = run_scenario(config, extended).hashes;
    hashes.emplace("10", more.at("10"));
    hashes.emplace("100", more.at("100"));
  }
  return hashes;
}

}  // namespace rai::scenario
