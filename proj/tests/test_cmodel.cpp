#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "support/oracles.hpp"
#include "tarepair/cmodel.hpp"
#include "tarepair/text.hpp"

using namespace tarepair;
using namespace tarepair::cmodel;

namespace {

std::string corpus_file(const std::string& c, const std::string& f = "ta.c") {
  return oracle::slurp(std::string(TAREPAIR_CORPUS_DIR) + "/cases/" + c + "/" + f);
}

std::vector<std::string> corpus_cases() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(std::string(TAREPAIR_CORPUS_DIR) + "/cases"))
    out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

const Statement* find_stmt(const SourceModel& m, std::string_view needle) {
  for (const auto& s : m.statements)
    if (s.text.find(needle) != std::string::npos) return &s;
  return nullptr;
}

}  // namespace

TEST_CASE("copy snippet: one handler, one copy, destination length") {
  auto m = load_source(corpus_file("ivw_copy_fig2"));
  REQUIRE(m.function("store") != nullptr);
  auto* s = find_stmt(m, "TEE_MemMove");
  REQUIRE(s != nullptr);
  CHECK(s->function == "store");
  auto* d = m.find_decl("buf", "store");
  REQUIRE(d != nullptr);
  CHECK(d->kind == DeclKind::Array);
  CHECK(d->length == 64);
  CHECK(d->elem_size == 1);
}

TEST_CASE("static array declaration with initializer") {
  auto m = load_source("int a[15] = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9};\n");
  REQUIRE(m.declarations.size() == 1);
  CHECK(m.declarations[0].name == "a");
  CHECK(m.declarations[0].kind == DeclKind::Array);
  CHECK(m.declarations[0].length == 15);
  CHECK(m.declarations[0].function.empty());
}

TEST_CASE("empty file") {
  auto m = load_source("");
  CHECK(m.statements.empty());
  CHECK(m.functions.empty());
}

TEST_CASE("unbalanced braces are reported with a line") {
  try {
    load_source("void f(void)\n{\n  int x;\n");
    FAIL("expected UnbalancedBraces");
  } catch (const UnbalancedBraces& e) {
    CHECK(e.line() >= 1);
  }
  CHECK_THROWS_AS(load_source("}\n"), UnbalancedBraces);
}

TEST_CASE("braces in comments and literals are ignored") {
  auto m = load_source("void f(void)\n{\n  /* { */ char *s = \"}\"; // {\n}\n");
  REQUIRE(m.functions.size() == 1);
  CHECK(m.find_decl("s", "f") != nullptr);
}

TEST_CASE("statement spans reproduce the statement text") {
  for (const auto& c : corpus_cases()) {
    CAPTURE(c);
    auto src = corpus_file(c);
    auto m = load_source(src);
    Pos prev{0, 0};
    for (const auto& s : m.statements) {
      CHECK(m.slice(s.span) == s.text);
      CHECK(prev <= s.span.begin);
      prev = s.span.end;
    }
  }
}

TEST_CASE("declaration spans sit in one function or at file scope") {
  for (const auto& c : corpus_cases()) {
    CAPTURE(c);
    auto m = load_source(corpus_file(c));
    for (const auto& d : m.declarations) {
      int owners = 0;
      for (const auto& f : m.functions)
        if (f.span.begin <= d.span.begin && d.span.end <= f.span.end) ++owners;
      CHECK(owners == (d.function.empty() ? 0 : 1));
    }
  }
}

TEST_CASE("abstraction of the rule shapes") {
  FunctionClassification fc;
  auto m = load_source(
      "void f(TEE_Param params[4])\n{\n"
      "  char plain[128];\n"
      "  TEE_MemMove(params[0].memref.buffer, plain, 128);\n"
      "  char* buf = params[3].memref.buffer;\n"
      "  *(params[3].memref.buffer + 10) = 0x55;\n"
      "  int x = 1;\n"
      "  x = x + 1;\n"
      "  if (x > 4) return TEE_ERROR_BAD_PARAMETERS;\n"
      "}\n");
  auto node_of = [&](std::string_view needle) {
    auto* s = find_stmt(m, needle);
    REQUIRE(s != nullptr);
    return abstract_statement(*s, fc, m);
  };

  auto copy = node_of("TEE_MemMove");
  REQUIRE(copy);
  auto& call = std::get<dsl::FuncCall>(copy->node);
  CHECK(call.kind == dsl::CallKind::Copy);
  REQUIRE(call.args.size() == 3);
  CHECK(concrete(call.args[0]) == "params[0].memref.buffer");
  CHECK(concrete(call.args[1]) == "plain");
  CHECK(concrete(call.args[2]) == "128");

  auto shallow = node_of("char* buf");
  REQUIRE(shallow);
  auto& sh = std::get<dsl::FuncCall>(shallow->node);
  CHECK(sh.kind == dsl::CallKind::Shallow);
  CHECK(concrete(sh.args.at(0)) == "params[3].memref.buffer");
  REQUIRE(sh.result);
  CHECK(concrete(*sh.result) == "buf");

  auto mutate = node_of("0x55");
  REQUIRE(mutate);
  CHECK(std::get<dsl::FuncCall>(mutate->node).kind == dsl::CallKind::Mutate);

  CHECK_FALSE(node_of("x = x + 1").has_value());

  auto guard = node_of("if (x > 4)");
  REQUIRE(guard);
  auto& g = std::get<dsl::Guard>(guard->node);
  CHECK(g.op == dsl::RelOp::Gt);
  CHECK(concrete(g.left) == "x");
  CHECK(concrete(g.right) == "4");
}

TEST_CASE("names in scope at the shallow-copy site") {
  auto m = load_source(
      "int counter;\n"
      "void f(uint32_t t, TEE_Param params[4])\n{\n"
      "  char* buf = params[3].memref.buffer;\n"
      "  int later = 0;\n"
      "}\n");
  auto at = names_in_scope(m, 4);
  CHECK(at.count("buf"));
  CHECK(at.count("params"));
  CHECK(at.count("counter"));
  CHECK_FALSE(at.count("later"));
  auto top = names_in_scope(m, 1);
  CHECK(top == std::set<std::string>{"counter"});
}

TEST_CASE("names in scope agree with a raw line scan on every corpus case") {
  for (const auto& c : corpus_cases()) {
    auto src = corpus_file(c);
    auto m = load_source(src);
    for (const auto& s : m.statements) {
      if (s.function.empty()) continue;
      CAPTURE(c);
      CAPTURE(s.span.begin.line);
      CHECK(names_in_scope(m, s.span.begin.line) == oracle::scope_scan(src, s.span.begin.line));
    }
  }
}

TEST_CASE("scope grows along straight-line code") {
  auto src = corpus_file("udo_copy_sizeof");
  auto m = load_source(src);
  for (const auto& f : m.functions) {
    auto body = m.body(f);
    for (std::size_t i = 1; i < body.size(); ++i) {
      if (body[i]->depth != body[i - 1]->depth) continue;
      auto a = names_in_scope(m, body[i - 1]->span.begin.line);
      auto b = names_in_scope(m, body[i]->span.begin.line);
      CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    }
  }
}

TEST_CASE("client spec: one command per case, default excluded") {
  FunctionClassification fc;
  auto m = load_source(
      "#define UUID_X { 0x01020304, 0x0506, 0x0708, { 1, 2, 3, 4, 5, 6, 7, 8 } }\n"
      "static TEE_Result handle_a(TEE_Param params[4]) { params[0].value.a = 1; return TEE_SUCCESS; }\n"
      "static TEE_Result handle_b(TEE_Param params[4])\n{\n"
      "  char local[8];\n"
      "  TEE_MemMove(local, params[2].memref.buffer, 8);\n"
      "  return TEE_SUCCESS;\n}\n"
      "TEE_Result TA_InvokeCommandEntryPoint(void *s, uint32_t cmd_id, uint32_t pt, TEE_Param params[4])\n{\n"
      "  switch (cmd_id) {\n"
      "  case 0:\n    return handle_a(params);\n"
      "  case 1:\n    return handle_b(params);\n"
      "  default:\n    return TEE_ERROR_BAD_PARAMETERS;\n"
      "  }\n}\n");
  auto spec = extract_client_spec(m, fc);
  REQUIRE(spec.commands.size() == 2);
  CHECK(spec.commands[0].value == 0);
  CHECK(spec.commands[1].value == 1);
  CHECK(spec.uuid == "01020304-0506-0708-0102-030405060708");
  CHECK(spec.commands[0].params[0] == ParamType::ValueOut);
  CHECK(spec.commands[1].params[2] == ParamType::MemrefIn);
  CHECK(spec.commands[1].params[0] == ParamType::None);
}

TEST_CASE("client spec errors") {
  FunctionClassification fc;
  CHECK_THROWS_AS(extract_client_spec(load_source("void f(void) { }\n"), fc), NoEntryPoint);
  auto no_cases = load_source(
      "#define U { 0x01020304, 0x0506, 0x0708, { 1, 2, 3, 4, 5, 6, 7, 8 } }\n"
      "TEE_Result TA_InvokeCommandEntryPoint(void *s, uint32_t cmd_id, uint32_t pt, TEE_Param params[4])\n"
      "{\n  return TEE_SUCCESS;\n}\n");
  CHECK_THROWS_AS(extract_client_spec(no_cases, fc), NoCases);
}

TEST_CASE("client spec finds UUID and command macros in a sidecar header") {
  FunctionClassification fc;
  auto m = load_source(corpus_file("sm_shallow_unknown"));
  auto h = load_source(corpus_file("sm_shallow_unknown", "ta.h"));
  CHECK_THROWS_AS(extract_client_spec(m, fc), NoUuid);
  auto spec = extract_client_spec(m, fc, {&h});
  CHECK(spec.uuid == "d3e85a16-0c47-4f2b-869a-5f30e21bc87d");
  REQUIRE(spec.commands.size() == 1);
  CHECK(spec.commands[0].value == 7);
}

TEST_CASE("corpus handler reading an input buffer types its slot memref-in") {
  FunctionClassification fc;
  auto spec = extract_client_spec(load_source(corpus_file("ivw_copy_fig2")), fc);
  REQUIRE(spec.commands.size() == 1);
  CHECK(spec.commands[0].params[1] == ParamType::MemrefIn);
  CHECK(spec.commands[0].params[0] == ParamType::ValueOut);
}

TEST_CASE("resolve_int handles literals, macros and sizeof") {
  auto m = load_source("#define LEN 32\nstatic char key[16];\nvoid f(void) { int x = 0; }\n");
  CHECK(m.resolve_int("64") == 64);
  CHECK(m.resolve_int("LEN") == 32);
  CHECK(m.resolve_int("sizeof(key)") == 16);
  CHECK_FALSE(m.resolve_int("x").has_value());
}
