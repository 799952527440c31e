#pragma once

#include <functional>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "rai/msgbus/bus.hpp"

namespace rai::whoami {
struct IdentityBundle;
}

namespace rai::toolkit {

// Per-agent state the built-in tools operate on.
struct ToolContext {
  msgbus::Bus* bus = nullptr;
  const whoami::IdentityBundle* identity = nullptr;
  std::string detect_service = "detect";
  msgbus::Millis service_timeout_ms = 2000;

  // Goals started by this agent, by goal id.
  std::map<std::string, msgbus::GoalHandle> goals;
  // receive_message subscriptions, created on first use.
  std::map<std::string, msgbus::Subscription> subscriptions;

  // Subscribes now so later receive_message calls see everything published
  // from this point on. Throws InvalidTopic.
  msgbus::Subscription& watch(const std::string& topic);

  msgbus::Bus& require_bus() const;
};

}  // namespace rai::toolkit
