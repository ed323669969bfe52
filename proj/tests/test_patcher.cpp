#include <doctest.h>

#include <algorithm>

#include "support/oracles.hpp"
#include "tarepair/cmodel.hpp"
#include "tarepair/detector.hpp"
#include "tarepair/dsl.hpp"
#include "tarepair/patcher.hpp"
#include "tarepair/synth.hpp"
#include "tarepair/templates.hpp"
#include "tarepair/text.hpp"

using namespace tarepair;
using namespace tarepair::patcher;
using templates::LineOp;

namespace {

const FunctionClassification kFc;

const std::vector<dsl::Rule>& rules() {
  static const auto r = dsl::load_rule_dir(std::string(TAREPAIR_TEST_DIR) + "/../rules");
  return r;
}

std::string golden(const std::string& f) { return oracle::slurp(std::string(TAREPAIR_TEST_DIR) + "/golden/rules/" + f); }

ConcretePatch patch_for(const cmodel::SourceModel& m, const detector::Issue& issue, synth::History& h,
                        const synth::Bindings& fallback = {}) {
  const auto& r = templates::select_rule(issue, rules());
  auto b = templates::match_trigger(r, issue.abs);
  REQUIRE(b);
  auto t = templates::instantiate(r, *b, m, kFc);
  auto bind = synth::resolve_heuristic(t, m, h, kFc);
  for (const auto& [k, v] : fallback) bind.emplace(k, v);
  for (const auto& p : synth::declared_placeholders(t)) h.assigned.insert(bind.at(p));
  return synth::apply_bindings(t, bind);
}

ConcretePatch first_patch(const std::string& src, const synth::Bindings& fallback = {}) {
  auto m = cmodel::load_source(src);
  auto issues = detector::detect(m, kFc);
  REQUIRE(!issues.empty());
  synth::History h;
  return patch_for(m, issues[0], h, fallback);
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::size_t at = 0;
  while (at <= s.size()) {
    auto nl = s.find('\n', at);
    if (nl == std::string::npos) {
      if (at < s.size()) out.push_back(s.substr(at));
      break;
    }
    out.push_back(s.substr(at, nl - at));
    at = nl + 1;
  }
  return out;
}

// Three independent handlers with one issue each.
const char* kThree =
    "#include <tee_internal_api.h>\n\n"
    "static TEE_Result a(uint32_t t, TEE_Param params[4])\n{\n"
    "\tchar buf[32];\n\n"
    "\tTEE_MemMove(buf, params[1].memref.buffer, params[1].memref.size);\n"
    "\treturn TEE_SUCCESS;\n}\n\n"
    "static TEE_Result b(uint32_t t, TEE_Param params[4])\n{\n"
    "\tchar plain[16] = \"k\";\n\n"
    "\tTEE_MemMove(params[0].memref.buffer, plain, 16);\n"
    "\treturn TEE_SUCCESS;\n}\n\n"
    "static TEE_Result c(uint32_t t, TEE_Param params[4])\n{\n"
    "\tint table[8] = {0};\n\n"
    "\ttable[params[2].value.a] = 1;\n"
    "\treturn TEE_SUCCESS;\n}\n";

}  // namespace

TEST_CASE("guard goes in front of the unchecked copy, nothing else moves") {
  auto src = oracle::slurp(std::string(TAREPAIR_CORPUS_DIR) + "/cases/ivw_copy_fig2/ta.c");
  auto p = first_patch(src);
  auto out = apply_patch(src, p);
  auto before = lines_of(src), after = lines_of(out);
  REQUIRE(after.size() == before.size() + 3);
  int copy_line = p.span.begin.line;  // 1-based
  CHECK(after[copy_line - 1] == "\tif (params[1].memref.size > 64) {");
  CHECK(after[copy_line] == "\t\treturn TEE_ERROR_BAD_PARAMETERS;");
  CHECK(after[copy_line + 1] == "\t}");
  CHECK(after[copy_line + 2] == before[copy_line - 1]);
  for (int i = 0; i < copy_line - 1; ++i) CHECK(after[i] == before[i]);
  for (std::size_t i = copy_line; i < before.size(); ++i) CHECK(after[i + 3] == before[i]);
}

TEST_CASE("identity patch") {
  auto src = golden("rule_2_1.c");
  auto p = first_patch(src);
  ConcretePatch id = p;
  id.lines.clear();
  for (const auto& l : p.lines)
    if (l.op != LineOp::Insert) id.lines.push_back({LineOp::Keep, l.text});
  CHECK(apply_patch(src, id) == src);
  auto diff = emit_diff(src, id, "rule_2_1.c");
  CHECK(diff.find("@@") == std::string::npos);
}

TEST_CASE("stale patch is refused") {
  auto src = golden("rule_1_1.c");
  auto p = first_patch(src);
  auto edited = text::replace_all(src, "TEE_MemMove(params[0].memref.buffer, plain, 128);",
                                  "TEE_MemMove(params[0].memref.buffer, plain, 64);");
  try {
    apply_patch(edited, p);
    FAIL("expected SpanMismatch");
  } catch (const SpanMismatch& e) {
    CHECK(e.expected().find("128") != std::string::npos);
    CHECK(e.found().find("64") != std::string::npos);
  }
}

TEST_CASE("delete matching tolerates whitespace differences") {
  auto src = golden("rule_1_1.c");
  auto p = first_patch(src);
  auto spaced = text::replace_all(src, "TEE_MemMove(params[0].memref.buffer, plain, 128);",
                                  "TEE_MemMove(params[0].memref.buffer,   plain,\t128);  ");
  CHECK_NOTHROW(apply_patch(spaced, p));
}

TEST_CASE("bottom-up ordering and overlap rejection") {
  ConcretePatch early, late;
  early.span = {{12, 1}, {12, 20}};
  late.span = {{40, 1}, {40, 20}};
  auto ordered = order_patches({early, late});
  REQUIRE(ordered.size() == 2);
  CHECK(ordered[0].span.begin.line == 40);
  CHECK(ordered[1].span.begin.line == 12);
  ConcretePatch same = early;
  CHECK_THROWS_AS(order_patches({early, same}), OverlappingPatches);
}

TEST_CASE("batch apply equals one-at-a-time apply with re-location") {
  auto m = cmodel::load_source(kThree);
  auto issues = detector::detect(m, kFc);
  REQUIRE(issues.size() == 3);
  synth::History h;
  std::vector<ConcretePatch> ps;
  for (const auto& i : issues) ps.push_back(patch_for(m, i, h));
  auto batch = apply_all(kThree, ps);

  // Oracle: top-down, re-detecting after each step and locating the next
  // issue by its statement text.
  std::string seq = kThree;
  synth::History h2;
  for (const auto& orig : issues) {
    auto mm = cmodel::load_source(seq);
    auto now = detector::detect(mm, kFc);
    auto it = std::find_if(now.begin(), now.end(), [&](const detector::Issue& x) {
      return x.statement == orig.statement && x.kind == orig.kind;
    });
    REQUIRE(it != now.end());
    seq = apply_patch(seq, patch_for(mm, *it, h2));
  }
  CHECK(batch == seq);
  CHECK(detector::detect(cmodel::load_source(batch), kFc).empty());
}

TEST_CASE("encrypt patch diff: one line out, three in") {
  auto src = golden("rule_1_1.c");
  auto p = first_patch(src);
  auto diff = emit_diff(src, p, "rule_1_1.c");
  CHECK(diff.rfind("--- a/rule_1_1.c\n+++ b/rule_1_1.c\n", 0) == 0);
  int minus = 0, plus = 0;
  for (const auto& l : lines_of(diff)) {
    if (l.rfind("---", 0) == 0 || l.rfind("+++", 0) == 0) continue;
    if (!l.empty() && l[0] == '-') ++minus;
    if (!l.empty() && l[0] == '+') ++plus;
  }
  CHECK(minus == 1);
  CHECK(plus == 3);
  CHECK(emit_diff(src, p, "rule_1_1.c") == diff);
}

TEST_CASE("guard diff on an input memref size") {
  auto src =
      "static TEE_Result f(uint32_t t, TEE_Param params[4])\n{\n\tchar buf[1024];\n"
      "\tTEE_MemMove(buf, params[2].memref.buffer, params[2].memref.size);\n\treturn TEE_SUCCESS;\n}\n";
  auto diff = emit_diff(src, first_patch(src), "ta.c");
  CHECK(diff.find("@@ -4,1 +4,4 @@") != std::string::npos);
  CHECK(diff.find("+\tif (params[2].memref.size > 1024) {\n") != std::string::npos);
  CHECK(diff.find(" \tTEE_MemMove(buf, params[2].memref.buffer, params[2].memref.size);\n") != std::string::npos);
}

TEST_CASE("GNU patch applied to the emitted diff reproduces apply_patch") {
  const synth::Bindings fallback{{"buf", "shadow"}, {"size", "64"}};
  for (const char* r : {"1_1", "1_2", "2_1", "2_2", "3_1", "3_2"}) {
    CAPTURE(r);
    auto src = golden(std::string("rule_") + r + ".c");
    auto p = first_patch(src, fallback);
    auto via_gnu = oracle::gnu_patch(src, emit_diff(src, p, "f.c"));
    REQUIRE(via_gnu.has_value());
    CHECK(*via_gnu == apply_patch(src, p));
  }
  auto m = cmodel::load_source(kThree);
  synth::History h;
  std::vector<ConcretePatch> ps;
  for (const auto& i : detector::detect(m, kFc)) ps.push_back(patch_for(m, i, h));
  auto via_gnu = oracle::gnu_patch(kThree, emit_file_diff(kThree, ps, "f.c"));
  REQUIRE(via_gnu.has_value());
  CHECK(*via_gnu == apply_all(kThree, ps));
}

TEST_CASE("inserted nested lines follow the file's tab indentation") {
  auto src = golden("rule_2_2.c");
  auto out = apply_patch(src, first_patch(src));
  CHECK(out.find("\tif (params[0].value.a - 8 > 15) {\n\t\treturn TEE_ERROR_BAD_PARAMETERS;\n\t}\n") !=
        std::string::npos);
  auto spaced = text::replace_all(src, "\t", "    ");
  auto out2 = apply_patch(spaced, first_patch(spaced));
  CHECK(out2.find("    if (params[0].value.a - 8 > 15) {\n        return TEE_ERROR_BAD_PARAMETERS;\n    }\n") !=
        std::string::npos);
}
