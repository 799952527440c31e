#include "rai/toolkit/builtin.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "rai/whoami/bundle.hpp"

namespace rai::toolkit {

using nlohmann::json;
namespace mb = rai::msgbus;

mb::Subscription& ToolContext::watch(const std::string& topic) {
  auto it = subscriptions.find(topic);
  if (it == subscriptions.end()) it = subscriptions.emplace(topic, require_bus().subscribe(topic)).first;
  return it->second;
}

mb::Bus& ToolContext::require_bus() const {
  if (bus == nullptr) throw std::logic_error("tool context has no bus");
  return *bus;
}

json parse_document(const std::string& text) {
  json parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded() && (parsed.is_object() || parsed.is_array())) return parsed;
  return json{{"text", text}};
}

bool label_matches(const std::string& label, const std::string& query) {
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
  };
  return lower(label).find(lower(query)) != std::string::npos;
}

namespace {

std::string format(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  std::string s = buf;
  // Keep "-0.0" out of the output.
  if (s.size() > 1 && s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string goal_id_arg(const ToolCall& call) { return call.arguments.at("goal_id").get<std::string>(); }

}  // namespace

Tool publish_message_tool() {
  ToolSpec spec{"publish_message",
                "Publish a message on a bus topic. The payload may be JSON or plain text.",
                {{"topic", ParamType::kText, true, "topic name, e.g. hri/out"},
                 {"payload", ParamType::kText, true, "message body"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            const auto topic = call.arguments.at("topic").get<std::string>();
            try {
              ctx.require_bus().publish(topic, parse_document(call.arguments.at("payload").get<std::string>()));
            } catch (const mb::InvalidTopic& ex) {
              return ToolOutcome::error(call.id, std::string("invalid topic: ") + ex.what());
            }
            return ToolOutcome::success(call.id, "published");
          }};
}

Tool receive_message_tool() {
  ToolSpec spec{"receive_message",
                "Wait for the next message on a topic and return it.",
                {{"topic", ParamType::kText, true, "topic name"},
                 {"timeout_ms", ParamType::kInteger, true, "how long to wait"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            const auto topic = call.arguments.at("topic").get<std::string>();
            const auto timeout = call.arguments.at("timeout_ms").get<std::int64_t>();
            if (timeout < 0) return ToolOutcome::error(call.id, "timeout_ms must be >= 0");
            mb::Subscription* sub = nullptr;
            try {
              sub = &ctx.watch(topic);
            } catch (const mb::InvalidTopic& ex) {
              return ToolOutcome::error(call.id, std::string("invalid topic: ") + ex.what());
            }
            auto msg = sub->try_pop();
            if (!msg && timeout > 0) msg = sub->pop(timeout);
            if (!msg) return ToolOutcome::success(call.id, "no message within " + std::to_string(timeout) + " ms");
            return ToolOutcome::success(call.id, msg->payload.dump());
          }};
}

Tool call_service_tool() {
  ToolSpec spec{"call_service",
                "Call a bus service and return its response.",
                {{"name", ParamType::kText, true, "service name"},
                 {"request", ParamType::kText, true, "request body, JSON or plain text"},
                 {"timeout_ms", ParamType::kInteger, true, "how long to wait for the response"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            const auto name = call.arguments.at("name").get<std::string>();
            const auto timeout = call.arguments.at("timeout_ms").get<std::int64_t>();
            if (timeout <= 0) return ToolOutcome::error(call.id, "timeout_ms must be > 0");
            try {
              json response = ctx.require_bus().call_service(
                  name, parse_document(call.arguments.at("request").get<std::string>()), timeout);
              return ToolOutcome::success(call.id, response.dump());
            } catch (const mb::ServiceNotFound& ex) {
              return ToolOutcome::error(call.id, std::string("service not found: ") + ex.what());
            } catch (const mb::Timeout& ex) {
              return ToolOutcome::error(call.id, std::string("timeout: ") + ex.what());
            } catch (const mb::HandlerError& ex) {
              return ToolOutcome::error(call.id, std::string("handler error: ") + ex.what());
            } catch (const mb::InvalidTopic& ex) {
              return ToolOutcome::error(call.id, std::string("invalid service name: ") + ex.what());
            }
          }};
}

Tool start_action_tool() {
  ToolSpec spec{"start_action",
                "Send a goal to an action server. Returns as soon as the goal is accepted or rejected.",
                {{"name", ParamType::kText, true, "action name, e.g. nav/goto"},
                 {"goal", ParamType::kText, true, "goal body as JSON"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            const auto name = call.arguments.at("name").get<std::string>();
            mb::GoalHandle handle;
            try {
              handle = ctx.require_bus().send_goal(name, parse_document(call.arguments.at("goal").get<std::string>()));
            } catch (const mb::ActionServerNotFound& ex) {
              return ToolOutcome::error(call.id, std::string("no action server: ") + ex.what());
            } catch (const mb::InvalidTopic& ex) {
              return ToolOutcome::error(call.id, std::string("invalid action name: ") + ex.what());
            }
            const std::string id = handle.id();
            const bool accepted = handle.accepted();
            ctx.goals[id] = std::move(handle);
            if (!accepted) return ToolOutcome::error(call.id, "rejected, goal_id=" + id);
            return ToolOutcome::success(call.id, "accepted, goal_id=" + id);
          }};
}

Tool get_action_status_tool() {
  ToolSpec spec{"get_action_status",
                "Report the status and latest feedback of a goal started with start_action.",
                {{"goal_id", ParamType::kText, true, "id returned by start_action"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            auto it = ctx.goals.find(goal_id_arg(call));
            if (it == ctx.goals.end()) return ToolOutcome::error(call.id, "unknown goal id " + goal_id_arg(call));
            const auto& handle = it->second;
            std::string text(mb::to_string(handle.status()));
            if (auto fb = handle.last_feedback()) text += " feedback=" + fb->dump();
            if (handle.terminal() && !handle.result().is_null()) text += " result=" + handle.result().dump();
            return ToolOutcome::success(call.id, text);
          }};
}

Tool cancel_action_tool() {
  ToolSpec spec{"cancel_action",
                "Cancel a running goal and report its terminal status.",
                {{"goal_id", ParamType::kText, true, "id returned by start_action"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            auto it = ctx.goals.find(goal_id_arg(call));
            if (it == ctx.goals.end()) return ToolOutcome::error(call.id, "unknown goal id " + goal_id_arg(call));
            try {
              auto status = ctx.require_bus().cancel_goal(it->second);
              return ToolOutcome::success(call.id, std::string(mb::to_string(status)));
            } catch (const mb::AlreadyTerminal& ex) {
              return ToolOutcome::error(call.id, std::string("already terminal: ") + ex.what());
            } catch (const mb::Timeout& ex) {
              return ToolOutcome::error(call.id, std::string("timeout: ") + ex.what());
            }
          }};
}

std::vector<Measurement> measure_objects(ToolContext& ctx, const std::vector<std::string>& names) {
  json response = ctx.require_bus().call_service(ctx.detect_service, json{{"queries", names}}, ctx.service_timeout_ms);
  std::vector<Measurement> out;
  std::set<std::string> seen;
  for (const auto& d : response.value("detections", json::array())) {
    Measurement m;
    m.label = d.at("label").get<std::string>();
    m.id = d.value("id", m.label);
    m.distance = d.at("distance").get<double>();
    m.bearing = d.at("bearing").get<double>();
    m.confidence = d.value("confidence", 0.0);
    m.depth = d.value("depth", m.distance);
    const bool wanted = std::any_of(names.begin(), names.end(), [&](const auto& n) { return label_matches(m.label, n); });
    if (wanted && seen.insert(m.id).second) out.push_back(std::move(m));
  }
  std::stable_sort(out.begin(), out.end(), [](const Measurement& a, const Measurement& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  });
  return out;
}

std::string render_distances(const std::vector<std::string>& names, const std::vector<Measurement>& measurements) {
  std::string out;
  auto line = [&out](const std::string& s) {
    if (!out.empty()) out += '\n';
    out += s;
  };
  for (const auto& m : measurements) {
    line(m.label + ": distance=" + format("%.2f", m.distance) + " bearing=" + format("%.1f", m.bearing));
  }
  for (const auto& n : names) {
    const bool found = std::any_of(measurements.begin(), measurements.end(),
                                   [&](const Measurement& m) { return label_matches(m.label, n); });
    if (!found) line(n + ": not visible");
  }
  return out;
}

Tool get_distance_to_objects_tool() {
  ToolSpec spec{"get_distance_to_objects",
                "Measure distance and bearing to visible objects whose label matches any of the given names.",
                {{"object_names", ParamType::kTextList, true, "object names to look for"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            const auto names = call.arguments.at("object_names").get<std::vector<std::string>>();
            if (names.empty()) return ToolOutcome::error(call.id, "object_names is empty");
            try {
              return ToolOutcome::success(call.id, render_distances(names, measure_objects(ctx, names)));
            } catch (const mb::BusError& ex) {
              return ToolOutcome::error(call.id, std::string("perception unavailable: ") + ex.what());
            }
          }};
}

Tool query_identity_tool() {
  ToolSpec spec{"query_identity",
                "Search the robot's own documentation and return the most relevant passages.",
                {{"question", ParamType::kText, true, "what to look up"},
                 {"k", ParamType::kInteger, true, "number of passages"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            if (ctx.identity == nullptr || !ctx.identity->store || ctx.identity->store->empty()) {
              return ToolOutcome::error(call.id, "no identity loaded");
            }
            const auto k = call.arguments.at("k").get<std::int64_t>();
            if (k <= 0) return ToolOutcome::error(call.id, "k must be positive");
            const auto hits = ctx.identity->store->query(call.arguments.at("question").get<std::string>(),
                                                         static_cast<std::size_t>(k));
            std::string out;
            for (std::size_t i = 0; i < hits.size(); ++i) {
              if (!out.empty()) out += '\n';
              out += std::to_string(i + 1) + ". [" + hits[i].chunk.doc_id + "#" + std::to_string(hits[i].chunk.seq) +
                     " score=" + format("%.3f", hits[i].score) + "] " + hits[i].chunk.text;
            }
            return ToolOutcome::success(call.id, out);
          }};
}

ToolRegistry builtin_registry() {
  ToolRegistry r;
  r.add(publish_message_tool());
  r.add(receive_message_tool());
  r.add(call_service_tool());
  r.add(start_action_tool());
  r.add(get_action_status_tool());
  r.add(cancel_action_tool());
  r.add(get_distance_to_objects_tool());
  r.add(query_identity_tool());
  return r;
}

}  // namespace rai::toolkit
