#include "rai/agents/records.hpp"

namespace rai::agents {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw RecordError(std::string("missing field \"") + name + "\"");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw RecordError(std::string("bad field \"") + name + "\"");
  }
}

}  // namespace

std::string_view to_string(MissionStatus status) {
  switch (status) {
    case MissionStatus::kPending: return "PENDING";
    case MissionStatus::kExecuting: return "EXECUTING";
    case MissionStatus::kSucceeded: return "SUCCEEDED";
    case MissionStatus::kFailed: return "FAILED";
  }
  return "?";
}

MissionStatus mission_status_from_string(std::string_view text) {
  for (auto s : {MissionStatus::kPending, MissionStatus::kExecuting, MissionStatus::kSucceeded,
                 MissionStatus::kFailed}) {
    if (to_string(s) == text) return s;
  }
  throw RecordError("unknown mission status " + std::string(text));
}

bool is_terminal(MissionStatus status) {
  return status == MissionStatus::kSucceeded || status == MissionStatus::kFailed;
}

void MissionRecord::check() const {
  if (is_terminal(status) == report.empty()) {
    throw RecordError("mission " + mission_id + ": report must be set exactly when the status is terminal");
  }
}

json to_json(const MissionRecord& record) {
  json j{{"mission_id", record.mission_id},
         {"prompt", record.prompt},
         {"status", to_string(record.status)},
         {"report", record.report}};
  if (record.final_distance) j["final_distance"] = *record.final_distance;
  return j;
}

MissionRecord mission_from_json(const json& j) {
  MissionRecord r;
  r.mission_id = field<std::string>(j, "mission_id");
  r.prompt = field<std::string>(j, "prompt");
  r.status = mission_status_from_string(field<std::string>(j, "status"));
  r.report = j.is_object() && j.contains("report") ? field<std::string>(j, "report") : "";
  if (j.contains("final_distance")) r.final_distance = field<double>(j, "final_distance");
  r.check();
  return r;
}

json to_json(const AnomalyEvent& event) {
  return {{"event_id", event.event_id},
          {"tick", event.tick},
          {"obstacle", {{"id", event.obstacle_id}, {"label", event.obstacle_label}, {"distance", event.obstacle_distance}}},
          {"observation", event.observation},
          {"pose", {{"x", event.pose.x}, {"y", event.pose.y}, {"heading", event.pose.heading}}}};
}

AnomalyEvent anomaly_from_json(const json& j) {
  AnomalyEvent e;
  e.event_id = field<std::string>(j, "event_id");
  e.tick = field<std::int64_t>(j, "tick");
  const json obstacle = field<json>(j, "obstacle");
  e.obstacle_id = field<std::string>(obstacle, "id");
  e.obstacle_label = field<std::string>(obstacle, "label");
  e.obstacle_distance = field<double>(obstacle, "distance");
  if (j.contains("observation")) e.observation = j["observation"];
  const json pose = field<json>(j, "pose");
  e.pose = {field<double>(pose, "x"), field<double>(pose, "y"), field<double>(pose, "heading")};
  return e;
}

json to_json(const Resolution& resolution) {
  json j{{"event_id", resolution.event_id},
         {"resolution", resolution.resolution},
         {"obstacle", resolution.obstacle_id},
         {"agent", resolution.agent}};
  if (!resolution.reason.empty()) j["reason"] = resolution.reason;
  return j;
}

Resolution resolution_from_json(const json& j) {
  Resolution r;
  r.event_id = field<std::string>(j, "event_id");
  r.resolution = field<std::string>(j, "resolution");
  r.obstacle_id = field<std::string>(j, "obstacle");
  r.agent = j.contains("agent") ? field<std::string>(j, "agent") : "";
  r.reason = j.contains("reason") ? field<std::string>(j, "reason") : "";
  return r;
}

}  // namespace rai::agents
