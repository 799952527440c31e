#include "rai/toolkit/tool.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "rai/toolkit/context.hpp"

namespace rai::toolkit {

using nlohmann::json;

std::string_view to_string(ParamType type) {
  switch (type) {
    case ParamType::kText: return "text";
    case ParamType::kNumber: return "number";
    case ParamType::kInteger: return "integer";
    case ParamType::kBoolean: return "boolean";
    case ParamType::kTextList: return "list-of-text";
  }
  return "?";
}

std::string_view to_string(ToolOutcome::Status status) {
  return status == ToolOutcome::Status::kOk ? "OK" : "ERROR";
}

const ParamSpec* ToolSpec::find(std::string_view field) const {
  for (const auto& p : parameters) {
    if (p.name == field) return &p;
  }
  return nullptr;
}

bool is_valid_tool_name(std::string_view name) {
  if (name.empty() || name.size() > 64) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

void validate_spec(const ToolSpec& spec) {
  if (!is_valid_tool_name(spec.name)) {
    throw std::invalid_argument("invalid tool name '" + spec.name + "'");
  }
  std::set<std::string> seen;
  for (const auto& p : spec.parameters) {
    if (p.name.empty()) throw std::invalid_argument(spec.name + ": empty parameter name");
    if (!seen.insert(p.name).second) {
      throw std::invalid_argument(spec.name + ": duplicate parameter '" + p.name + "'");
    }
  }
}

namespace {

json schema_type(ParamType type) {
  switch (type) {
    case ParamType::kText: return {{"type", "string"}};
    case ParamType::kNumber: return {{"type", "number"}};
    case ParamType::kInteger: return {{"type", "integer"}};
    case ParamType::kBoolean: return {{"type", "boolean"}};
    case ParamType::kTextList: return {{"type", "array"}, {"items", {{"type", "string"}}}};
  }
  return json::object();
}

bool matches(ParamType type, const json& value) {
  switch (type) {
    case ParamType::kText: return value.is_string();
    case ParamType::kNumber: return value.is_number();
    case ParamType::kInteger: return value.is_number_integer();
    case ParamType::kBoolean: return value.is_boolean();
    case ParamType::kTextList:
      return value.is_array() &&
             std::all_of(value.begin(), value.end(), [](const json& v) { return v.is_string(); });
  }
  return false;
}

}  // namespace

json to_function_schema(const ToolSpec& spec) {
  json properties = json::object();
  json required = json::array();
  for (const auto& p : spec.parameters) {
    json prop = schema_type(p.type);
    if (!p.description.empty()) prop["description"] = p.description;
    properties[p.name] = std::move(prop);
    if (p.required) required.push_back(p.name);
  }
  return {{"name", spec.name},
          {"description", spec.description},
          {"parameters", {{"type", "object"}, {"properties", properties}, {"required", required}}}};
}

std::string Violation::describe() const {
  switch (kind) {
    case Kind::kMissingRequired: return "missing required \"" + field + "\"";
    case Kind::kUnknownField: return "unknown field \"" + field + "\"";
    case Kind::kTypeMismatch: return "type mismatch \"" + field + "\"";
    case Kind::kNotAnObject: return "arguments must be an object";
  }
  return "?";
}

std::vector<Violation> validate_args(const ToolSpec& spec, const json& args) {
  if (!args.is_object()) return {{Violation::Kind::kNotAnObject, ""}};
  std::vector<Violation> out;
  for (const auto& p : spec.parameters) {
    auto it = args.find(p.name);
    if (it == args.end()) {
      if (p.required) out.push_back({Violation::Kind::kMissingRequired, p.name});
    } else if (!matches(p.type, *it)) {
      out.push_back({Violation::Kind::kTypeMismatch, p.name});
    }
  }
  for (auto it = args.begin(); it != args.end(); ++it) {
    if (spec.find(it.key()) == nullptr) out.push_back({Violation::Kind::kUnknownField, it.key()});
  }
  return out;
}

std::string ToolOutcome::text() const {
  std::string out;
  for (const auto& part : content) {
    if (part.type != ContentPart::Type::kText) continue;
    if (!out.empty()) out += '\n';
    out += part.text;
  }
  return out;
}

ToolOutcome ToolOutcome::success(std::string id, std::string text) {
  return {std::move(id), Status::kOk, {ContentPart::make_text(std::move(text))}};
}

ToolOutcome ToolOutcome::error(std::string id, std::string text) {
  if (text.empty()) text = "error";
  return {std::move(id), Status::kError, {ContentPart::make_text(std::move(text))}};
}

void ToolRegistry::add(Tool tool) {
  validate_spec(tool.spec);
  if (!tool.body) throw std::invalid_argument(tool.spec.name + ": missing body");
  if (contains(tool.spec.name)) throw std::invalid_argument("duplicate tool '" + tool.spec.name + "'");
  tools_.push_back(std::move(tool));
}

const Tool* ToolRegistry::find(std::string_view name) const {
  for (const auto& t : tools_) {
    if (t.spec.name == name) return &t;
  }
  return nullptr;
}

std::vector<ToolSpec> ToolRegistry::specs() const {
  std::vector<ToolSpec> out;
  out.reserve(tools_.size());
  for (const auto& t : tools_) out.push_back(t.spec);
  return out;
}

std::vector<std::string> ToolRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& t : tools_) out.push_back(t.spec.name);
  return out;
}

ToolRegistry ToolRegistry::subset(const std::vector<std::string>& names) const {
  ToolRegistry out;
  for (const auto& name : names) {
    const Tool* t = find(name);
    if (t == nullptr) throw std::invalid_argument("unknown tool '" + name + "'");
    out.add(*t);
  }
  return out;
}

ToolOutcome execute(const ToolCall& call, const ToolRegistry& registry, ToolContext& context) {
  const Tool* tool = registry.find(call.name);
  if (tool == nullptr) return ToolOutcome::error(call.id, "unknown tool \"" + call.name + "\"");
  auto violations = validate_args(tool->spec, call.arguments);
  if (!violations.empty()) {
    std::string text = "invalid arguments:";
    for (const auto& v : violations) text += " " + v.describe() + ";";
    text.pop_back();
    return ToolOutcome::error(call.id, text);
  }
  ToolOutcome outcome;
  try {
    outcome = tool->body(call, context);
  } catch (const std::exception& ex) {
    outcome = ToolOutcome::error(call.id, call.name + " failed: " + ex.what());
  } catch (...) {
    outcome = ToolOutcome::error(call.id, call.name + " failed");
  }
  outcome.tool_call_id = call.id;
  if (!outcome.ok() && outcome.text().empty()) {
    outcome.content.push_back(ContentPart::make_text(call.name + " failed"));
  }
  return outcome;
}

}  // namespace rai::toolkit
