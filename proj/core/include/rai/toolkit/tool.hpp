#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace rai::toolkit {

// One piece of model-facing content: text or a reference to an image asset.
struct ContentPart {
  enum class Type { kText, kImage };
  Type type = Type::kText;
  std::string text;
  std::string image_ref;

  static ContentPart make_text(std::string text) { return {Type::kText, std::move(text), {}}; }
  static ContentPart make_image(std::string asset_id) { return {Type::kImage, {}, std::move(asset_id)}; }
  friend bool operator==(const ContentPart&, const ContentPart&) = default;
};

enum class ParamType { kText, kNumber, kInteger, kBoolean, kTextList };

std::string_view to_string(ParamType type);

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::kText;
  bool required = true;
  std::string description;
};

struct ToolSpec {
  std::string name;
  std::string description;
  // Ordered; validation reports violations in this order.
  std::vector<ParamSpec> parameters;

  const ParamSpec* find(std::string_view field) const;
};

bool is_valid_tool_name(std::string_view name);
// Throws std::invalid_argument when the name or parameter list is malformed.
void validate_spec(const ToolSpec& spec);

// Function-calling JSON shape: {name, description, parameters: JSON Schema}.
nlohmann::json to_function_schema(const ToolSpec& spec);

struct ToolCall {
  std::string id;
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();
  friend bool operator==(const ToolCall&, const ToolCall&) = default;
};

struct Violation {
  enum class Kind { kMissingRequired, kUnknownField, kTypeMismatch, kNotAnObject };
  Kind kind;
  std::string field;

  std::string describe() const;
  friend bool operator==(const Violation&, const Violation&) = default;
};

// Every violation: declared fields in spec order (missing or mistyped), then
// unknown fields in argument order. Empty means valid.
std::vector<Violation> validate_args(const ToolSpec& spec, const nlohmann::json& args);

struct ToolOutcome {
  enum class Status { kOk, kError };
  std::string tool_call_id;
  Status status = Status::kOk;
  std::vector<ContentPart> content;

  bool ok() const { return status == Status::kOk; }
  // Text parts joined with '\n'.
  std::string text() const;

  static ToolOutcome success(std::string id, std::string text);
  static ToolOutcome error(std::string id, std::string text);
};

std::string_view to_string(ToolOutcome::Status status);

struct ToolContext;

using ToolBody = std::function<ToolOutcome(const ToolCall& call, ToolContext& context)>;

struct Tool {
  ToolSpec spec;
  ToolBody body;
};

// Tools by name. Filled once at startup, then only read.
class ToolRegistry {
 public:
  // Throws std::invalid_argument on a bad spec or a duplicate name.
  void add(Tool tool);
  const Tool* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::vector<ToolSpec> specs() const;
  std::vector<std::string> names() const;
  std::size_t size() const { return tools_.size(); }

  // A registry holding only the named tools, in the order given.
  ToolRegistry subset(const std::vector<std::string>& names) const;

 private:
  std::vector<Tool> tools_;
};

// Never throws: unknown tools, invalid arguments and exceptions raised by the
// body all come back as ERROR outcomes.
ToolOutcome execute(const ToolCall& call, const ToolRegistry& registry, ToolContext& context);

}  // namespace rai::toolkit
