#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "support/oracles.hpp"
#include "tarepair/cmodel.hpp"
#include "tarepair/detector.hpp"
#include "tarepair/dsl.hpp"

using namespace tarepair;
using namespace tarepair::detector;

namespace {

const FunctionClassification kFc;

std::vector<Issue> run(const std::string& src) { return detect(cmodel::load_source(src), kFc); }

std::string wrap(const std::string& body) {
  return "static TEE_Result f(uint32_t param_types, TEE_Param params[4])\n{\n" + body + "\treturn TEE_SUCCESS;\n}\n";
}

std::string test_file(const std::string& rel) { return oracle::slurp(std::string(TAREPAIR_TEST_DIR) + "/" + rel); }

}  // namespace

TEST_CASE("unchecked copy: one input validation issue at the copy") {
  auto src = oracle::slurp(std::string(TAREPAIR_CORPUS_DIR) + "/cases/ivw_copy_fig2/ta.c");
  auto issues = run(src);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].kind == IssueKind::InputValidationWeakness);
  CHECK(issues[0].rule_hint == "2.1");
  CHECK(issues[0].statement == "TEE_MemMove(buf, params[1].memref.buffer, params[1].memref.size);");
  CHECK(issues[0].span.begin.line == 13);
  CHECK(issues[0].id == "I1");
}

TEST_CASE("empty source") { CHECK(run("").empty()); }

TEST_CASE("plaintext copied out") {
  auto issues = run(wrap("\tchar plain[128] = \"s\";\n\tTEE_MemMove(params[0].memref.buffer, plain, 128);\n"));
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].kind == IssueKind::UnencryptedOutput);
  CHECK(issues[0].rule_hint == "1.1");
  CHECK(issues[0].evidence.at("out") == "params[0].memref.buffer");
  CHECK(issues[0].evidence.at("plain") == "plain");
  CHECK(issues[0].evidence.at("len") == "128");
}

TEST_CASE("encrypted copy-out is clean") {
  CHECK(run(wrap("\tchar plain[128] = \"s\";\n\tchar cipher[128] = {0};\n\tenc(plain, cipher, 128);\n"
                 "\tTEE_MemMove(params[0].memref.buffer, cipher, 128);\n"))
            .empty());
}

TEST_CASE("raw-pointer indirection is a documented miss") {
  auto src =
      "static char data[32] = \"secret\";\n"
      "void copy(char *str, int size)\n{\n\tTEE_MemMove(str, data, strlen(data));\n}\n" +
      wrap("\tcopy(params[0].memref.buffer, params[0].memref.size);\n");
  auto issues = run(src);
  CHECK(std::none_of(issues.begin(), issues.end(),
                     [](const Issue& i) { return i.kind == IssueKind::UnencryptedOutput; }));
}

TEST_CASE("formatted output of plaintext arguments") {
  auto issues = run(wrap("\tchar a0[8] = \"x\";\n\tchar a1[8] = \"y\";\n"
                         "\tsnprintf(params[0].memref.buffer, params[0].memref.size, \"%s %s\", a0, a1);\n"));
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].rule_hint == "1.2");
}

TEST_CASE("input-derived array index") {
  auto issues = run(wrap("\tint array[16] = {0};\n\tarray[params[0].value.a - 8] = 43;\n"));
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].kind == IssueKind::InputValidationWeakness);
  CHECK(issues[0].rule_hint == "2.2");
  CHECK(issues[0].evidence.at("index") == "params[0].value.a - 8");
  CHECK(issues[0].evidence.at("base") == "array");
}

TEST_CASE("guards before the use suppress input validation issues") {
  CHECK(run(wrap("\tchar buf[64];\n\tif (params[1].memref.size > 64) {\n\t\treturn TEE_ERROR_BAD_PARAMETERS;\n\t}\n"
                 "\tTEE_MemMove(buf, params[1].memref.buffer, params[1].memref.size);\n"))
            .empty());
  auto only_upper = run(wrap("\tint array[16] = {0};\n\tif (params[0].value.a > 15)\n\t\treturn TEE_ERROR_BAD_PARAMETERS;\n"
                             "\tarray[params[0].value.a] = 43;\n"));
  REQUIRE(only_upper.size() == 1);
  CHECK(only_upper[0].rule_hint == "2.2");
  CHECK(run(wrap("\tint array[16] = {0};\n\tif (params[0].value.a > 15)\n\t\treturn TEE_ERROR_BAD_PARAMETERS;\n"
                 "\tif (params[0].value.a < 0)\n\t\treturn TEE_ERROR_BAD_PARAMETERS;\n"
                 "\tarray[params[0].value.a] = 43;\n"))
            .empty());
}

TEST_CASE("guard after the use does not count") {
  auto issues = run(wrap("\tchar buf[64];\n\tTEE_MemMove(buf, params[1].memref.buffer, params[1].memref.size);\n"
                         "\tif (params[1].memref.size > 64)\n\t\treturn TEE_ERROR_BAD_PARAMETERS;\n"));
  CHECK(std::any_of(issues.begin(), issues.end(), [](const Issue& i) { return i.rule_hint == "2.1"; }));
}

TEST_CASE("table lookup and input buffer indexing") {
  auto src = "static int a[15] = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9};\n" +
             wrap("\tint v = a[params[1].value.a];\n\tchar *array = (char *)params[2].memref.buffer;\n"
                  "\tchar c = array[15];\n\tparams[0].value.a = v + c;\n");
  auto issues = run(src);
  auto has = [&](std::string_view stmt, std::string_view hint) {
    return std::any_of(issues.begin(), issues.end(),
                       [&](const Issue& i) { return i.statement.find(stmt) != std::string::npos && i.rule_hint == hint; });
  };
  CHECK(has("a[params[1].value.a]", "2.2"));
  CHECK(has("array[15]", "2.2"));
  CHECK(has("char *array", "3.1"));
}

TEST_CASE("shared memory aliasing and in-place mutation") {
  auto alias = run(wrap("\tchar* buf = params[3].memref.buffer;\n\tparams[0].value.a = buf[0];\n"));
  REQUIRE(!alias.empty());
  CHECK(alias[0].kind == IssueKind::SharedMemoryUse);
  CHECK(alias[0].rule_hint == "3.1");
  auto mut = run(wrap("\t*(params[3].memref.buffer + 10) = 0x55;\n"));
  REQUIRE(mut.size() == 1);
  CHECK(mut[0].kind == IssueKind::SharedMemoryUse);
  CHECK(mut[0].rule_hint == "3.2");
}

TEST_CASE("deep copy with hash comparison is clean") {
  CHECK(run(wrap("\tchar buf[64] = {0};\n\tTEE_MemMove(buf, params[3].memref.buffer, 64);\n"
                 "\tchar h1[256];\n\tread(h1);\n\tchar h2[256];\n\thash(h2, buf, 64);\n"
                 "\tif (TEE_MemCompare(h1, h2, 256) != 0) {\n\t\treturn TEE_ERROR_BAD_PARAMETERS;\n\t}\n"))
            .empty());
}

TEST_CASE("ids follow span order and evidence covers the hinted trigger") {
  auto rules = dsl::load_rule_dir(std::string(TAREPAIR_TEST_DIR) + "/../rules");
  for (const auto& e : std::filesystem::directory_iterator(std::string(TAREPAIR_TEST_DIR) + "/golden/rules")) {
    if (e.path().extension() != ".c") continue;
    CAPTURE(e.path().filename().string());
    auto issues = run(oracle::slurp(e.path().string()));
    REQUIRE(!issues.empty());
    for (std::size_t i = 0; i < issues.size(); ++i) {
      CHECK(issues[i].id == "I" + std::to_string(i + 1));
      if (i > 0) CHECK(issues[i - 1].span.begin <= issues[i].span.begin);
      const dsl::Rule* r = nullptr;
      for (const auto& rr : rules)
        if (rr.name == issues[i].rule_hint) r = &rr;
      REQUIRE(r != nullptr);
      for (const auto& name : r->bound) CHECK(issues[i].evidence.count(name));
    }
  }
}

TEST_CASE("every corpus case seeds one issue of its class") {
  const std::map<std::string, IssueKind> prefix{{"udo", IssueKind::UnencryptedOutput},
                                                {"ivw", IssueKind::InputValidationWeakness},
                                                {"sm_", IssueKind::SharedMemoryUse}};
  int cases = 0;
  for (const auto& e : std::filesystem::directory_iterator(std::string(TAREPAIR_CORPUS_DIR) + "/cases")) {
    auto name = e.path().filename().string();
    CAPTURE(name);
    auto issues = run(oracle::slurp(e.path().string() + "/ta.c"));
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].kind == prefix.at(name.substr(0, 3)));
    ++cases;
  }
  CHECK(cases == 12);
}

TEST_CASE("detection is deterministic") {
  auto src = test_file("golden/rules/rule_1_2.c");
  auto a = run(src), b = run(src);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].statement == b[i].statement);
    CHECK(a[i].span == b[i].span);
    CHECK(a[i].evidence == b[i].evidence);
  }
}
