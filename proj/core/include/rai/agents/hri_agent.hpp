#pragma once

#include "rai/agents/conversational.hpp"
#include "rai/agents/records.hpp"

namespace rai::agents {

// Tool the HRI agent's model calls to hand a task to the control agent.
// Publishes a PENDING MissionRecord on mission/requests.
toolkit::Tool dispatch_mission_tool();

// Tools the HRI agent offers by default: dispatch_mission, query_identity,
// get_distance_to_objects.
toolkit::ToolRegistry hri_registry();

// Conversational agent on hri/in and hri/out. At the start of each iteration
// it relays every pending mission/status record to hri/out unchanged under
// "mission", with a one-line summary in "text".
class HriAgent : public ConversationalAgent {
 public:
  HriAgent(std::string id, msgbus::Bus& bus, msgbus::Millis period_ms, ConversationalConfig config);

  std::size_t relayed() const { return relayed_; }

 protected:
  void before_turns() override;

 private:
  msgbus::Subscription status_;
  msgbus::Registration status_arrivals_;
  std::map<std::string, std::int64_t> status_arrived_at_;
  std::size_t relayed_ = 0;
};

std::string summarize(const nlohmann::json& mission_record);

}  // namespace rai::agents
