#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rai/scenario/transcript.hpp"

namespace rai::scenario {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string diagnosis;
};

nlohmann::json to_json(const CheckResult& result);

// Evaluates the checks declared in the transcript's scenario_start record
// against the transcript alone, followed by the implicit checks: the terminal
// condition was reached (when one was configured) and scripted providers ran
// out only if the scenario expected it. Throws TranscriptError when the
// start or end record is missing.
//
// Check documents ({"type": ..., params}):
//   mission            count, expect, target, tolerance, report_contains
//   hri_latency        max (1), min_turns
//   reply_contains     topic, text
//   no_mission         (no mission/requests published)
//   sorted             groups [{labels, region}]
//   stacked            order
//   swapped            a, b
//   manip_error        code
//   route_completed
//   safety_violations  count
//   detour_clearance   min (0.5)
//   resolution         expect, count (1), fail_safe
//   world_outcome      expect
//   image_parts        agent, count
//   anomalies          count, min_distance
// Any check may set "expect_fail": true to invert its verdict.
std::vector<CheckResult> run_checks(const std::vector<TranscriptEvent>& events);

// Every check result passed.
bool all_passed(const std::vector<CheckResult>& results);

}  // namespace rai::scenario
