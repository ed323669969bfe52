#pragma once

// Repair-rule DSL: a rule is a trigger program and a transformer program
// separated by `=>`. Programs are `;`-separated nodes; a node is either a
// function-call abstraction (COPY, ENC, ...) or a guard `IF(l, op, r) -> return ECODE`.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tarepair/error.hpp"

namespace tarepair::dsl {

enum class CallKind {
  Copy,
  Snprint,
  Malloc,
  Enc,
  MulMalloc,
  MulEnc,
  Array,
  Shallow,
  Read,
  Write,
  Hash,
  Mutate,
};

std::string_view to_string(CallKind k);
std::optional<CallKind> call_kind_from(std::string_view keyword);

enum class RelOp { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(RelOp op);
std::optional<RelOp> rel_op_from(std::string_view s);

struct Identifier {
  std::string name;
  bool operator==(const Identifier&) const = default;
};
struct Literal {
  std::string text;
  bool operator==(const Literal&) const = default;
};
// `$name`; the name `_` is the discard placeholder and never binds.
struct Placeholder {
  std::string name;
  bool operator==(const Placeholder&) const = default;
  bool is_discard() const { return name == "_"; }
};
struct AddressOf {
  std::string name;
  bool operator==(const AddressOf&) const = default;
};
struct EqualTerm;

using Term = std::variant<Identifier, Literal, Placeholder, AddressOf, std::shared_ptr<EqualTerm>>;

// Reserved comparison term `equal(a, b)`; only admitted as a guard operand.
struct EqualTerm {
  Term lhs;
  Term rhs;
};

bool term_equal(const Term& a, const Term& b);
std::string render_term(const Term& t);
const Placeholder* as_placeholder(const Term& t);

struct FuncCall {
  CallKind kind;
  std::vector<Term> args;
  std::optional<Term> result;
};

struct Guard {
  Term left;
  RelOp op;
  Term right;
  std::string action = "return ECODE";
};

using Node = std::variant<FuncCall, Guard>;

struct Program {
  std::vector<Node> nodes;
};

struct Rule {
  std::string name;
  Program trigger;
  Program transformer;
  // Placeholders occurring in the trigger (minus `_`).
  std::set<std::string> bound;
  // Transformer-only placeholders in a synthesizable slot.
  std::set<std::string> fresh;
  // Trigger placeholders bound to a variadic argument list (SNPRINT Args).
  std::set<std::string> lists;
};

bool structurally_equal(const Program& a, const Program& b);
bool structurally_equal(const Rule& a, const Rule& b);

struct SourcePos {
  std::size_t offset = 0;
  int line = 1;
  int col = 1;
};

class SyntaxError : public Error {
 public:
  SyntaxError(SourcePos pos, std::string expected);
  const SourcePos& position() const { return pos_; }
  const std::string& expected() const { return expected_; }

 private:
  SourcePos pos_;
  std::string expected_;
};

class ArityError : public Error {
 public:
  ArityError(CallKind kind, std::size_t got, std::string want);
  CallKind kind() const { return kind_; }
  std::size_t got() const { return got_; }
  const std::string& want() const { return want_; }

 private:
  CallKind kind_;
  std::size_t got_;
  std::string want_;
};

class MissingSeparator : public Error {
 public:
  explicit MissingSeparator(const std::string& detail) : Error("MissingSeparator", detail) {}
};

Rule parse_rule(std::string_view text, std::string name = {});
Program parse_program(std::string_view text);

// Rule files: rules separated by blank lines, `#` line comments, and an
// optional `# name: <rule name>` comment naming the following rule.
std::vector<Rule> parse_rule_file(std::string_view text, std::string_view default_name = "rule");
std::vector<Rule> load_rule_dir(const std::string& dir);

std::string render_node(const Node& n);
std::string render_program(const Program& p);
std::string render_rule(const Rule& r);

enum class Severity { Info, Warning, Error };
std::string_view to_string(Severity s);

struct Finding {
  Severity severity;
  std::string code;  // UnboundPlaceholder, UnusedBinding, ExpansionMismatch
  std::string name;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool clean() const;  // no warnings or errors
  bool has(std::string_view code, std::string_view name = {}) const;
};

ValidationReport validate_rule(const Rule& r);

// Every placeholder name appearing in a program (excluding `_`).
std::set<std::string> placeholders_of(const Program& p);

}  // namespace tarepair::dsl
