#pragma once

#include <optional>
#include <string_view>

namespace rai::msgbus {

enum class ActionStatus {
  kPending,
  kAccepted,
  kRejected,
  kExecuting,
  kSucceeded,
  kAborted,
  kCanceled,
};

// PENDING -> {ACCEPTED, REJECTED}; ACCEPTED -> EXECUTING;
// EXECUTING -> {SUCCEEDED, ABORTED, CANCELED}.
bool can_transition(ActionStatus from, ActionStatus to);
bool is_terminal(ActionStatus status);

std::string_view to_string(ActionStatus status);
std::optional<ActionStatus> action_status_from_string(std::string_view text);

}  // namespace rai::msgbus
