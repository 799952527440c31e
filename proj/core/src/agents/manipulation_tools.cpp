#include "rai/agents/manipulation_tools.hpp"

#include <cstdio>

#include "rai/toolkit/builtin.hpp"
#include "rai/toolkit/context.hpp"

namespace rai::agents {

using nlohmann::json;
using toolkit::ParamType;
using toolkit::ToolCall;
using toolkit::ToolContext;
using toolkit::ToolOutcome;

namespace {

constexpr msgbus::Millis kManipTimeoutMs = 2000;

ToolOutcome manip(const ToolCall& call, ToolContext& ctx, const json& request) {
  json reply = ctx.require_bus().call_service("manip", request, kManipTimeoutMs);
  if (!reply.value("ok", false)) {
    return ToolOutcome::error(call.id, reply.value("error", std::string("ERROR")) + ": " +
                                           reply.value("message", std::string()));
  }
  std::string text = "ok: " + reply.value("op", std::string()) + " " + reply.value("object", std::string());
  if (reply.contains("pose")) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " now at x=%.2f y=%.2f z=%.2f", reply["pose"]["x"].get<double>(),
                  reply["pose"]["y"].get<double>(), reply["pose"]["z"].get<double>());
    text += buf;
  }
  return ToolOutcome::success(call.id, text);
}

}  // namespace

toolkit::Tool describe_scene_tool() {
  toolkit::ToolSpec spec{"describe_scene", "List the objects on the table with their positions.", {}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            json scene = ctx.require_bus().call_service("scene/objects", json::object(), kManipTimeoutMs);
            std::string text;
            for (const auto& o : scene.value("objects", json::array())) {
              char buf[256];
              std::snprintf(buf, sizeof buf, "%s (%s): x=%.2f y=%.2f z=%.2f size=%.2fx%.2fx%.2f",
                            o.at("id").get<std::string>().c_str(), o.at("label").get<std::string>().c_str(),
                            o.at("x").get<double>(), o.at("y").get<double>(), o.at("z").get<double>(),
                            2 * o.at("hx").get<double>(), 2 * o.at("hy").get<double>(), o.at("height").get<double>());
              if (!text.empty()) text += '\n';
              text += buf;
              if (o.contains("supported_by")) text += " on " + o["supported_by"].get<std::string>();
            }
            if (!scene.value("held", json()).is_null()) text += "\nholding " + scene["held"].get<std::string>();
            return ToolOutcome::success(call.id, text.empty() ? "no objects" : text);
          }};
}

toolkit::Tool pick_object_tool() {
  toolkit::ToolSpec spec{"pick_object", "Pick an object up with the gripper.",
                         {{"object_id", ParamType::kText, true, "id of the object"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            return manip(call, ctx, {{"pick", call.arguments.at("object_id")}});
          }};
}

toolkit::Tool place_object_at_tool() {
  toolkit::ToolSpec spec{"place_object_at",
                         "Put the held object down on the table, centred at (x, y).",
                         {{"x", ParamType::kNumber, true, "x coordinate"}, {"y", ParamType::kNumber, true, "y coordinate"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            return manip(call, ctx, {{"place_at", {{"x", call.arguments.at("x")}, {"y", call.arguments.at("y")}}}});
          }};
}

toolkit::Tool place_object_on_tool() {
  toolkit::ToolSpec spec{"place_object_on", "Put the held object on top of another object.",
                         {{"object_id", ParamType::kText, true, "id of the object to stack on"}}};
  return {spec, [](const ToolCall& call, ToolContext& ctx) {
            return manip(call, ctx, {{"place_on", call.arguments.at("object_id")}});
          }};
}

toolkit::ToolRegistry manipulation_registry() {
  toolkit::ToolRegistry r;
  r.add(describe_scene_tool());
  r.add(pick_object_tool());
  r.add(place_object_at_tool());
  r.add(place_object_on_tool());
  r.add(toolkit::get_distance_to_objects_tool());
  r.add(toolkit::query_identity_tool());
  return r;
}

}  // namespace rai::agents
