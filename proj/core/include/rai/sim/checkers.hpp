#pragma once

#include <string>
#include <vector>

#include "rai/sim/world.hpp"

namespace rai::sim {

struct Verdict {
  bool pass = false;
  std::string diagnosis;
};

// Objects whose label contains any of `labels` belong in `region`.
struct SortGroup {
  std::vector<std::string> labels;
  std::string region;
};

// Every object in a group has its centre inside that group's region.
Verdict check_sorted(const WorldState& state, const std::vector<SortGroup>& groups);

// order[0] is on the ground, order[i] rests on order[i-1].
Verdict check_stacked(const WorldState& state, const std::vector<std::string>& order);

inline constexpr double kSwapTolerance = 0.1;

// a sits within kSwapTolerance of b's initial position and vice versa.
Verdict check_swapped(const WorldState& state, const std::string& a, const std::string& b,
                      const WorldState& initial);

}  // namespace rai::sim
