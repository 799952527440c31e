#include "rai/scenario/checks.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "rai/sim/checkers.hpp"
#include "rai/sim/geometry.hpp"
#include "rai/sim/orchard.hpp"
#include "rai/sim/world_io.hpp"
#include "rai/toolkit/builtin.hpp"

namespace rai::scenario {

using nlohmann::json;

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

struct View {
  const std::vector<TranscriptEvent>& events;
  json start;
  json end;

  // Payloads published on `topic`, in order.
  std::vector<json> published(const std::string& topic) const {
    std::vector<json> out;
    for (const auto& e : events) {
      if (e.source == "bus" && e.kind == "pub" && e.payload.value("topic", "") == topic) {
        out.push_back(e.payload.value("payload", json()));
      }
    }
    return out;
  }
  std::vector<const TranscriptEvent*> of_kind(const std::string& kind) const {
    std::vector<const TranscriptEvent*> out;
    for (const auto& e : events) {
      if (e.kind == kind) out.push_back(&e);
    }
    return out;
  }
  std::vector<const TranscriptEvent*> world(const std::string& kind) const {
    std::vector<const TranscriptEvent*> out;
    for (const auto& e : events) {
      if (e.source == "world" && e.kind == kind) out.push_back(&e);
    }
    return out;
  }
  sim::WorldState final_state() const { return sim::world_from_json(end.at("final_state")); }
  sim::WorldState initial_state() const { return sim::world_from_json(start.at("initial_state")); }
};

CheckResult result(std::string name, bool pass, std::string diagnosis = {}) {
  return {std::move(name), pass, std::move(diagnosis)};
}

CheckResult check_mission(const View& v, const json& c) {
  const int count = c.value("count", 1);
  const std::string expect = c.value("expect", "SUCCEEDED");
  std::vector<json> terminal;
  std::map<std::string, int> per_mission;
  for (const auto& r : v.published("mission/status")) {
    const std::string s = r.value("status", "");
    if (s == "SUCCEEDED" || s == "FAILED") {
      terminal.push_back(r);
      ++per_mission[r.value("mission_id", "")];
    }
  }
  for (const auto& r : v.published("mission/requests")) {
    const auto id = r.value("mission_id", "");
    if (per_mission[id] != 1) {
      return result("mission", false, "mission " + id + " has " + std::to_string(per_mission[id]) + " terminal records");
    }
  }
  if (static_cast<int>(terminal.size()) != count) {
    return result("mission", false,
                  "expected " + std::to_string(count) + " terminal records, saw " + std::to_string(terminal.size()));
  }
  for (const auto& r : terminal) {
    if (r.value("status", "") != expect) {
      return result("mission", false, "mission " + r.value("mission_id", "") + " ended " + r.value("status", "") +
                                          ": " + r.value("report", ""));
    }
    if (c.contains("report_contains") &&
        r.value("report", "").find(c["report_contains"].get<std::string>()) == std::string::npos) {
      return result("mission", false, "report \"" + r.value("report", "") + "\" lacks \"" +
                                          c["report_contains"].get<std::string>() + "\"");
    }
  }
  std::string diag = std::to_string(terminal.size()) + " terminal " + expect;
  if (c.contains("target")) {
    const auto target = c["target"].get<std::string>();
    const double tolerance = c.value("tolerance", 0.25);
    const auto state = v.final_state();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& o : state.objects) {
      if (toolkit::label_matches(o.label, target)) {
        best = std::min(best, sim::point_box_distance(state.robot.position(), o.footprint()));
      }
    }
    if (!(best <= tolerance)) {
      return result("mission", false, "robot-" + target + " distance " + fmt("%.3f", best) + " > " + fmt("%.2f", tolerance));
    }
    diag += ", robot-" + target + " distance " + fmt("%.3f", best);
  }
  return result("mission", true, diag);
}

CheckResult check_latency(const View& v, const json& c) {
  const int max = c.value("max", 1);
  const int min_turns = c.value("min_turns", 1);
  int turns = 0;
  int worst = 0;
  for (const auto* kind : {"turn", "relay"}) {
    for (const auto* e : v.of_kind(kind)) {
      const int lat = e->payload.value("latency_iterations", -1);
      if (lat < 0 || lat > max) {
        return result("hri_latency", false, std::string(kind) + " " + e->payload.value("message_id", "") +
                                                " answered after " + std::to_string(lat) + " iterations");
      }
      worst = std::max(worst, lat);
      if (std::string(kind) == "turn") ++turns;
    }
  }
  if (turns < min_turns) {
    return result("hri_latency", false, "only " + std::to_string(turns) + " answered turns");
  }
  return result("hri_latency", true, std::to_string(turns) + " turns, worst latency " + std::to_string(worst));
}

CheckResult check_reply(const View& v, const json& c) {
  const auto topic = c.value("topic", "hri/out");
  const auto text = c.at("text").get<std::string>();
  for (const auto& p : v.published(topic)) {
    if (p.value("text", "").find(text) != std::string::npos) return result("reply_contains", true, "found on " + topic);
  }
  return result("reply_contains", false, "no reply on " + topic + " contains \"" + text + "\"");
}

CheckResult check_verdict(const std::string& name, const sim::Verdict& v) {
  return result(name, v.pass, v.diagnosis);
}

CheckResult check_manip_error(const View& v, const json& c) {
  const auto code = c.at("code").get<std::string>();
  for (const auto* e : v.world("manip_error")) {
    if (e->payload.value("error", "") == code) {
      return result("manip_error", true, code + " at tick " + std::to_string(e->tick));
    }
  }
  return result("manip_error", false, "no " + code + " manipulation error");
}

CheckResult check_route(const View& v) {
  for (const auto& s : v.published("tractor/status")) {
    if (s.value("event", "") == "route_completed") return result("route_completed", true);
  }
  return result("route_completed", false, "route not completed");
}

CheckResult check_violations(const View& v, const json& c) {
  const auto n = static_cast<int>(v.world(sim::kSafetyViolation).size());
  const int expect = c.value("count", 0);
  return result("safety_violations", n == expect,
                std::to_string(n) + " safety violations, expected " + std::to_string(expect));
}

CheckResult check_clearance(const View& v, const json& c) {
  const double min = c.value("min", sim::kDetourMargin);
  const auto detours = v.world("detour");
  if (detours.empty()) return result("detour_clearance", false, "no detour was planned");
  const json clearance = v.end.at("final_state").value("min_clearance", json::object());
  double worst = std::numeric_limits<double>::infinity();
  for (const auto* d : detours) {
    const auto id = d->payload.value("obstacle", "");
    worst = std::min(worst, d->payload.value("clearance", 0.0));
    if (clearance.contains(id)) worst = std::min(worst, clearance[id].get<double>());
  }
  return result("detour_clearance", worst >= min - 1e-9, "minimum clearance " + fmt("%.3f", worst));
}

CheckResult check_resolution(const View& v, const json& c) {
  const auto resolutions = v.published("anomaly/resolutions");
  const int count = c.value("count", 1);
  if (static_cast<int>(resolutions.size()) != count) {
    return result("resolution", false, std::to_string(resolutions.size()) + " resolutions, expected " + std::to_string(count));
  }
  const auto& names = sim::resolution_names();
  for (const auto& r : resolutions) {
    const auto name = r.value("resolution", "");
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      return result("resolution", false, "undeclared resolution " + name);
    }
    if (c.contains("expect") && name != c["expect"].get<std::string>()) {
      return result("resolution", false, "resolution " + name + ", expected " + c["expect"].get<std::string>());
    }
  }
  if (c.contains("fail_safe")) {
    const bool want = c["fail_safe"].get<bool>();
    for (const auto* e : v.of_kind("resolution")) {
      if (e->source == "world") continue;
      if (e->payload.value("fail_safe", false) != want) {
        return result("resolution", false, want ? "resolution was not a fail-safe" : "fail-safe resolution");
      }
    }
  }
  return result("resolution", true, resolutions.back().value("resolution", ""));
}

CheckResult check_outcome(const View& v, const json& c) {
  const auto got = v.end.at("final_state").value("outcome", "");
  const auto expect = c.value("expect", "");
  return result("world_outcome", got == expect, "outcome \"" + got + "\"");
}

CheckResult check_images(const View& v, const json& c) {
  const auto agent = c.at("agent").get<std::string>();
  const int count = c.at("count").get<int>();
  int sessions = 0;
  for (const auto* e : v.of_kind("session_open")) {
    if (e->source != agent) continue;
    ++sessions;
    const int parts = e->payload.value("image_parts", -1);
    if (parts != count) {
      return result("image_parts", false, agent + " session with " + std::to_string(parts) + " image parts");
    }
  }
  if (sessions == 0) return result("image_parts", false, agent + " opened no session");
  return result("image_parts", true, std::to_string(sessions) + " sessions with " + std::to_string(count) + " image parts");
}

CheckResult check_anomalies(const View& v, const json& c) {
  const auto events = v.published("anomaly/events");
  const int count = c.value("count", 1);
  if (static_cast<int>(events.size()) != count) {
    return result("anomalies", false, std::to_string(events.size()) + " anomaly events, expected " + std::to_string(count));
  }
  const double min_distance = c.value("min_distance", 0.0);
  for (const auto& e : events) {
    const double d = e.at("obstacle").value("distance", 0.0);
    if (d < min_distance) return result("anomalies", false, "halted " + fmt("%.2f", d) + " from the obstacle");
  }
  return result("anomalies", true, std::to_string(events.size()) + " anomaly events");
}

CheckResult run_one(const View& v, const json& c) {
  const auto type = c.value("type", "");
  if (type == "mission") return check_mission(v, c);
  if (type == "hri_latency") return check_latency(v, c);
  if (type == "reply_contains") return check_reply(v, c);
  if (type == "no_mission") {
    const auto n = v.published("mission/requests").size();
    return result("no_mission", n == 0, std::to_string(n) + " missions dispatched");
  }
  if (type == "sorted") {
    std::vector<sim::SortGroup> groups;
    for (const auto& g : c.at("groups")) {
      groups.push_back({g.at("labels").get<std::vector<std::string>>(), g.at("region").get<std::string>()});
    }
    return check_verdict("sorted", sim::check_sorted(v.final_state(), groups));
  }
  if (type == "stacked") {
    return check_verdict("stacked", sim::check_stacked(v.final_state(), c.at("order").get<std::vector<std::string>>()));
  }
  if (type == "swapped") {
    return check_verdict("swapped", sim::check_swapped(v.final_state(), c.at("a").get<std::string>(),
                                                       c.at("b").get<std::string>(), v.initial_state()));
  }
  if (type == "manip_error") return check_manip_error(v, c);
  if (type == "route_completed") return check_route(v);
  if (type == "safety_violations") return check_violations(v, c);
  if (type == "detour_clearance") return check_clearance(v, c);
  if (type == "resolution") return check_resolution(v, c);
  if (type == "world_outcome") return check_outcome(v, c);
  if (type == "image_parts") return check_images(v, c);
  if (type == "anomalies") return check_anomalies(v, c);
  return result(type.empty() ? "?" : type, false, "unknown check type");
}

}  // namespace

json to_json(const CheckResult& r) { return {{"name", r.name}, {"pass", r.pass}, {"diagnosis", r.diagnosis}}; }

std::vector<CheckResult> run_checks(const std::vector<TranscriptEvent>& events) {
  const TranscriptEvent* start = nullptr;
  const TranscriptEvent* end = nullptr;
  for (const auto& e : events) {
    if (e.source != "runner") continue;
    if (e.kind == "scenario_start") start = &e;
    if (e.kind == "scenario_end") end = &e;
  }
  if (start == nullptr) throw TranscriptError("transcript has no scenario_start record");
  if (end == nullptr) throw TranscriptError("transcript has no scenario_end record");
  View v{events, start->payload, end->payload};

  std::vector<CheckResult> out;
  for (const auto& c : start->payload.value("checks", json::array())) {
    try {
      CheckResult r = run_one(v, c);
      if (c.value("expect_fail", false)) {
        r.name += " (expected to fail)";
        r.pass = !r.pass;
      }
      out.push_back(std::move(r));
    } catch (const std::exception& ex) {
      out.push_back(result(c.value("type", "?"), false, std::string("check failed to run: ") + ex.what()));
    }
  }
  if (start->payload.value("has_terminal", false)) {
    const bool reached = end->payload.value("terminal_reached", false);
    out.push_back(result("terminal", reached,
                         reached ? "reached at tick " + std::to_string(end->tick) : "max_ticks reached first"));
  }
  std::size_t exhausted = 0;
  for (const auto* e : v.of_kind("model_error")) {
    if (e->payload.value("type", "") == "ScriptExhausted") ++exhausted;
  }
  if (start->payload.value("expect_script_exhaustion", false)) {
    out.push_back(result("script", exhausted > 0, std::to_string(exhausted) + " script exhaustions (expected)"));
  } else {
    out.push_back(result("script", exhausted == 0, std::to_string(exhausted) + " script exhaustions"));
  }
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
}

}  // namespace rai::scenario
