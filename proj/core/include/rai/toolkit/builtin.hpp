#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/toolkit/context.hpp"
#include "rai/toolkit/tool.hpp"

namespace rai::toolkit {

Tool publish_message_tool();
Tool receive_message_tool();
Tool call_service_tool();
Tool start_action_tool();
Tool get_action_status_tool();
Tool cancel_action_tool();
Tool get_distance_to_objects_tool();
Tool query_identity_tool();

// Every tool above, in that order.
ToolRegistry builtin_registry();

// Text holding a JSON object or list becomes that document; anything else
// becomes {"text": text}.
nlohmann::json parse_document(const std::string& text);

struct Measurement {
  std::string id;
  std::string label;
  double distance = 0.0;
  // Degrees relative to the robot heading, counter-clockwise positive.
  double bearing = 0.0;
  double confidence = 0.0;
  // Range along the centre ray to the object's footprint.
  double depth = 0.0;
};

// Detections matching any of `names`, nearest first. Throws the bus errors of
// the detect service call.
std::vector<Measurement> measure_objects(ToolContext& context, const std::vector<std::string>& names);

// One "label: distance=D.DD bearing=B.B" line per measurement, then
// "name: not visible" for each name no measurement matched.
std::string render_distances(const std::vector<std::string>& names,
                             const std::vector<Measurement>& measurements);

// Case-insensitive substring test used for open-set label matching.
bool label_matches(const std::string& label, const std::string& query);

}  // namespace rai::toolkit
