#include "rai/sim/checkers.hpp"

#include "rai/toolkit/builtin.hpp"

namespace rai::sim {

namespace {

const WorldObject* find_in(const WorldState& s, const std::string& id) {
  for (const auto& o : s.objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

void append(std::string& diag, const std::string& text) {
  if (!diag.empty()) diag += "; ";
  diag += text;
}

}  // namespace

Verdict check_sorted(const WorldState& state, const std::vector<SortGroup>& groups) {
  std::string diag;
  for (const auto& g : groups) {
    auto region = state.regions.find(g.region);
    if (region == state.regions.end()) {
      append(diag, "unknown region " + g.region);
      continue;
    }
    for (const auto& o : state.objects) {
      bool member = false;
      for (const auto& l : g.labels) member = member || toolkit::label_matches(o.label, l);
      if (member && !region->second.contains(o.pose.position())) append(diag, o.id + " outside " + g.region);
    }
    if (state.held) {
      for (const auto& l : g.labels) {
        if (toolkit::label_matches(state.held->label, l)) {
          append(diag, state.held->id + " still held");
          break;
        }
      }
    }
  }
  return {diag.empty(), diag};
}

Verdict check_stacked(const WorldState& state, const std::vector<std::string>& order) {
  if (order.empty()) return {false, "empty stack order"};
  const WorldObject* base = find_in(state, order[0]);
  if (base == nullptr) return {false, "level 0 expected " + order[0] + " found nothing"};
  if (!base->supported_by.empty()) return {false, "level 0 expected " + order[0] + " on the ground"};
  for (std::size_t level = 1; level < order.size(); ++level) {
    const WorldObject* found = nullptr;
    for (const auto& o : state.objects) {
      if (o.supported_by == order[level - 1]) found = &o;
    }
    if (found == nullptr) {
      return {false, "level " + std::to_string(level) + " expected " + order[level] + " found nothing"};
    }
    if (found->id != order[level]) {
      return {false, "level " + std::to_string(level) + " expected " + order[level] + " found " + found->id};
    }
  }
  return {true, ""};
}

Verdict check_swapped(const WorldState& state, const std::string& a, const std::string& b,
                      const WorldState& initial) {
  const WorldObject* a0 = find_in(initial, a);
  const WorldObject* b0 = find_in(initial, b);
  if (a0 == nullptr || b0 == nullptr) return {false, "pair missing from initial snapshot"};
  const WorldObject* a1 = find_in(state, a);
  const WorldObject* b1 = find_in(state, b);
  std::string diag;
  if (b1 == nullptr || distance(b1->pose.position(), a0->pose.position()) > kSwapTolerance) {
    append(diag, b + " not at " + a + "'s origin");
  }
  if (a1 == nullptr || distance(a1->pose.position(), b0->pose.position()) > kSwapTolerance) {
    append(diag, a + " not at " + b + "'s origin");
  }
  return {diag.empty(), diag};
}

}  // namespace rai::sim
