#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace rai::agents {

namespace topics {
inline constexpr const char* kHriIn = "hri/in";
inline constexpr const char* kHriOut = "hri/out";
inline constexpr const char* kMissionRequests = "mission/requests";
inline constexpr const char* kMissionStatus = "mission/status";
inline constexpr const char* kAnomalyEvents = "anomaly/events";
inline constexpr const char* kAnomalyResolutions = "anomaly/resolutions";
inline constexpr const char* kTractorStatus = "tractor/status";
}  // namespace topics

class RecordError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class MissionStatus { kPending, kExecuting, kSucceeded, kFailed };

std::string_view to_string(MissionStatus status);
// Throws RecordError.
MissionStatus mission_status_from_string(std::string_view text);
bool is_terminal(MissionStatus status);

struct MissionRecord {
  std::string mission_id;
  std::string prompt;
  MissionStatus status = MissionStatus::kPending;
  // Non-empty exactly when the status is terminal.
  std::string report;
  std::optional<double> final_distance;

  // Throws RecordError when the report rule is broken.
  void check() const;
};

nlohmann::json to_json(const MissionRecord& record);
// Throws RecordError.
MissionRecord mission_from_json(const nlohmann::json& j);

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

// Raised by the tractor when an obstacle enters its lookahead corridor.
struct AnomalyEvent {
  std::string event_id;
  std::int64_t tick = 0;
  std::string obstacle_id;
  std::string obstacle_label;
  double obstacle_distance = 0.0;
  // Camera observation document at the time of the event.
  nlohmann::json observation = nlohmann::json::object();
  Pose pose;
};

nlohmann::json to_json(const AnomalyEvent& event);
AnomalyEvent anomaly_from_json(const nlohmann::json& j);

struct Resolution {
  std::string event_id;
  // One of sim::resolution_names().
  std::string resolution;
  std::string obstacle_id;
  std::string agent;
  std::string reason;
};

nlohmann::json to_json(const Resolution& resolution);
Resolution resolution_from_json(const nlohmann::json& j);

}  // namespace rai::agents
