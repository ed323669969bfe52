#pragma once

// Trigger matching and transformer lowering into `-`/`+` patch templates.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tarepair/cmodel.hpp"
#include "tarepair/config.hpp"
#include "tarepair/detector.hpp"
#include "tarepair/dsl.hpp"
#include "tarepair/error.hpp"

namespace tarepair::templates {

enum class LineOp { Keep, Delete, Insert };

struct TemplateLine {
  LineOp op = LineOp::Insert;
  std::string text;
  bool operator==(const TemplateLine&) const = default;
};

struct MatchBindings {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::string>> lists;  // variadic placeholders
  cmodel::AbstractStmt stmt;

  // Domain of the bindings (scalar and list names).
  std::set<std::string> names() const;
};

// What a placeholder stands for: a fresh identifier or a size/bound value.
enum class Role { Name, Value };

struct PatchTemplate {
  std::string rule;
  cmodel::Span span;
  std::size_t stmt_index = 0;
  std::string function;
  std::map<std::string, std::string> bound;  // scalar trigger bindings
  std::vector<TemplateLine> lines;
  std::set<std::string> placeholders;  // without the `$`
  std::map<std::string, Role> roles;
  std::vector<std::string> notes;
};

// A template with every placeholder substituted.
struct ConcretePatch {
  cmodel::Span span;
  std::size_t stmt_index = 0;
  std::vector<TemplateLine> lines;
  std::string rule;
  std::string issue_id;
  std::string resolver;  // heuristic, external or replay
};

class NoApplicableRule : public Error {
 public:
  explicit NoApplicableRule(const std::string& kind) : Error("NoApplicableRule", "no rule applies to " + kind) {}
};

class LoweringError : public Error {
 public:
  explicit LoweringError(const std::string& node) : Error("LoweringError", "no lowering for " + node) {}
};

const dsl::Rule& select_rule(const detector::Issue& issue, const std::vector<dsl::Rule>& rules);

std::optional<MatchBindings> match_trigger(const dsl::Rule& rule, const cmodel::AbstractStmt& stmt);

PatchTemplate instantiate(const dsl::Rule& rule, const MatchBindings& b, const cmodel::SourceModel& m,
                          const FunctionClassification& fc = {});

// `$name` tokens in order of first appearance, without the `$`.
std::vector<std::string> placeholder_tokens(std::string_view s);

// Diff-like block: "+ ", "- " and "  " prefixes, one line each.
std::string render(const std::vector<TemplateLine>& lines);
std::string render(const PatchTemplate& t);

// Parse a rendered block back into lines.
std::vector<TemplateLine> parse_block(std::string_view block);

// Comparison form: whitespace removed and placeholders renamed $1, $2, ...
// in order of first appearance.
std::string canonical(const std::vector<TemplateLine>& lines);

}  // namespace tarepair::templates
