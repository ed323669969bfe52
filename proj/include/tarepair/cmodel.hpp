#pragma once

// Statement-level model of trusted-application C source. Not a C parser:
// the loader splits on `;` and braces outside comments and literals, tracks
// brace depth and function bodies, and recognizes simple declarations.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tarepair/config.hpp"
#include "tarepair/dsl.hpp"
#include "tarepair/error.hpp"

namespace tarepair::cmodel {

// Lines are 1-based, columns are 0-based byte offsets; `end` is exclusive.
struct Pos {
  int line = 1;
  int col = 0;
  auto operator<=>(const Pos&) const = default;
};

struct Span {
  Pos begin;
  Pos end;
  bool operator==(const Span&) const = default;
};

enum class StmtKind {
  Simple,     // terminated by ';'
  Header,     // terminated by '{' (if/for/while/function headers, bare blocks)
  Label,      // `case X:` / `default:`
  Directive,  // preprocessor line
};

struct Statement {
  Span span;
  std::string text;  // exact source slice
  std::string code;  // comments removed, whitespace collapsed
  std::string function;
  int depth = 0;
  StmtKind kind = StmtKind::Simple;
  std::optional<Pos> block_end;  // headers: position just after the matching '}'
  std::size_t index = 0;
};

enum class DeclKind { Array, Pointer, Scalar };

struct Declaration {
  std::string name;
  DeclKind kind = DeclKind::Scalar;
  std::string type;  // base type words, e.g. "char", "uint32_t"
  int elem_size = 0;  // 0 when unknown
  std::optional<std::int64_t> length;  // array length hint
  std::string length_text;             // bracket contents as written
  std::string init;                    // initializer text, if any
  Span span;
  std::string function;  // "" at file scope
  bool is_param = false;
  int depth = 0;
};

struct FunctionDef {
  std::string name;
  std::vector<std::string> params;
  Span span;
  std::size_t header_index = 0;  // statement index of the header
  std::size_t end_index = 0;     // one past the last body statement
};

class UnbalancedBraces : public Error {
 public:
  explicit UnbalancedBraces(int line)
      : Error("UnbalancedBraces", "unbalanced braces near line " + std::to_string(line)), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class SourceModel {
 public:
  std::vector<std::string> lines;
  std::vector<Statement> statements;
  std::vector<Declaration> declarations;
  std::vector<FunctionDef> functions;
  std::map<std::string, std::string> macros;
  std::string source;
  std::vector<std::size_t> line_offsets;  // byte offset of each line start

  std::size_t offset(const Pos& p) const;
  Pos pos(std::size_t offset) const;

  std::string slice(const Span& s) const;
  const FunctionDef* function(std::string_view name) const;
  const FunctionDef* function_at(int line) const;
  // Declaration visible from `function` (locals and params first, then file scope).
  const Declaration* find_decl(std::string_view name, std::string_view function) const;
  // Integer value of a literal, object-like macro, or `sizeof` of a static array.
  std::optional<std::int64_t> resolve_int(std::string_view expr, std::string_view function = {}) const;
  // Statements of a function body, excluding its header.
  std::vector<const Statement*> body(const FunctionDef& f) const;
};

SourceModel load_source(std::string_view text);

// A call expression found in a statement.
struct CallSite {
  std::string callee;
  std::vector<std::string> args;
  std::string lhs;  // assigned/declared name, if any
};

// A statement lifted to a DSL node. Terms are dsl::Literal holding the
// concrete C expression text.
struct AbstractStmt {
  dsl::Node node;
  std::size_t stmt_index = 0;
  Span span;
  std::string text;
  std::optional<CallSite> call;
};

struct ArrayAccess {
  std::string base;
  std::string index;
};

// `base[index]` accesses outside declarators, excluding the input parameter array.
std::vector<ArrayAccess> array_accesses(const Statement& s, const FunctionClassification& fc);

std::optional<CallSite> find_call(std::string_view code);

// Assignment operator position in `code` at top level (`=`, `+=`, ...), or npos.
std::size_t find_assignment(std::string_view code, std::size_t* op_len = nullptr);

// Strip leading C casts such as `(char *)`.
std::string strip_casts(std::string_view expr);

// Concrete text of a term produced by abstract_statement.
std::string concrete(const dsl::Term& t);

std::optional<AbstractStmt> abstract_statement(const Statement& s, const FunctionClassification& fc,
                                               const SourceModel& m);

// Names of declarations and parameters visible at `line`.
std::set<std::string> names_in_scope(const SourceModel& m, int line);

enum class ParamType { None, ValueIn, ValueOut, MemrefIn, MemrefOut };
std::string_view to_string(ParamType t);

struct Command {
  std::string id;                        // as written in the case label
  std::optional<std::int64_t> value;     // resolved numeric id
  std::array<ParamType, 4> params{};
  std::vector<std::string> functions;    // dispatched handlers defined in the model
};

struct ClientSpec {
  std::string uuid;          // canonical 8-4-4-4-12
  std::string uuid_initializer;  // C initializer for TEEC_UUID
  std::vector<Command> commands;

  const Command* command_for_function(std::string_view fn) const;
};

class NoEntryPoint : public Error {
 public:
  explicit NoEntryPoint(const std::string& name) : Error("NoEntryPoint", "no entry point " + name) {}
};
class NoCases : public Error {
 public:
  NoCases() : Error("NoCases", "entry point has no case labels") {}
};
class NoUuid : public Error {
 public:
  NoUuid() : Error("NoUuid", "no UUID definition found") {}
};

// `headers` are additional models searched for the UUID and command macros.
ClientSpec extract_client_spec(const SourceModel& m, const FunctionClassification& fc,
                               const std::vector<const SourceModel*>& headers = {});

}  // namespace tarepair::cmodel
