#include "rai/msgbus/action_status.hpp"

#include <array>
#include <utility>

namespace rai::msgbus {

namespace {
constexpr std::array<std::pair<ActionStatus, std::string_view>, 7> kNames{{
    {ActionStatus::kPending, "PENDING"},
    {ActionStatus::kAccepted, "ACCEPTED"},
    {ActionStatus::kRejected, "REJECTED"},
    {ActionStatus::kExecuting, "EXECUTING"},
    {ActionStatus::kSucceeded, "SUCCEEDED"},
    {ActionStatus::kAborted, "ABORTED"},
    {ActionStatus::kCanceled, "CANCELED"},
}};
}  // namespace

bool can_transition(ActionStatus from, ActionStatus to) {
  using S = ActionStatus;
  switch (from) {
    case S::kPending:
      return to == S::kAccepted || to == S::kRejected;
    case S::kAccepted:
      return to == S::kExecuting;
    case S::kExecuting:
      return to == S::kSucceeded || to == S::kAborted || to == S::kCanceled;
    case S::kRejected:
    case S::kSucceeded:
    case S::kAborted:
    case S::kCanceled:
      return false;
  }
  return false;
}

bool is_terminal(ActionStatus status) {
  return status == ActionStatus::kRejected || status == ActionStatus::kSucceeded ||
         status == ActionStatus::kAborted || status == ActionStatus::kCanceled;
}

std::string_view to_string(ActionStatus status) {
  for (const auto& [s, name] : kNames) {
    if (s == status) return name;
  }
  return "UNKNOWN";
}

std::optional<ActionStatus> action_status_from_string(std::string_view text) {
  for (const auto& [s, name] : kNames) {
    if (name == text) return s;
  }
  return std::nullopt;
}

}  // namespace rai::msgbus
