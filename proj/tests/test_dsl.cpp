#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "tarepair/dsl.hpp"
#include "tarepair/text.hpp"

using namespace tarepair::dsl;

namespace {

const std::string kRulesDir = std::string(TAREPAIR_TEST_DIR) + "/../rules";

std::string arrows_to_ascii(std::string s) { return tarepair::text::replace_all(std::move(s), "→", "->"); }

}  // namespace

TEST_CASE("encrypt-before-copy rule") {
  auto r = parse_rule(
      "COPY($out,$plain,$len) → _ => MALLOC($len) -> $cipher; ENC($plain,$cipher,$len) → _; "
      "COPY($out,$cipher,$len) → _");
  CHECK(r.trigger.nodes.size() == 1);
  CHECK(r.transformer.nodes.size() == 3);
  CHECK(r.fresh == std::set<std::string>{"cipher"});
  CHECK(r.bound == std::set<std::string>{"out", "plain", "len"});
}

TEST_CASE("READ takes no arguments and has a result") {
  auto r = parse_rule("READ() → $h1 => READ() → $h1");
  auto& call = std::get<FuncCall>(r.trigger.nodes.at(0));
  CHECK(call.kind == CallKind::Read);
  CHECK(call.args.empty());
  REQUIRE(call.result);
  CHECK(as_placeholder(*call.result)->name == "h1");
}

TEST_CASE("arity violations") {
  try {
    parse_rule("COPY($a,$b) → _ => COPY($a,$b,$c) → _");
    FAIL("expected ArityError");
  } catch (const ArityError& e) {
    CHECK(e.kind() == CallKind::Copy);
    CHECK(e.got() == 2);
    CHECK(e.want() == "3");
  }
  CHECK_THROWS_AS(parse_rule("READ($x) → $h => READ() → $h"), ArityError);
}

TEST_CASE("separator errors") {
  CHECK_THROWS_AS(parse_rule("COPY($a,$b,$c) → _"), MissingSeparator);
  CHECK_THROWS_AS(parse_rule("COPY($a,$b,$c) → _ => COPY($a,$b,$c) → _ => READ() → $h"), SyntaxError);
}

TEST_CASE("syntax errors carry a position") {
  try {
    parse_rule("COPY($a,$b,$c) → _ =>\n  COPY($a $b, $c) → _");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position().line == 2);
    CHECK(e.position().col > 1);
    CHECK_FALSE(e.expected().empty());
  }
  CHECK_THROWS_AS(parse_rule("FROB($a) → _ => READ() → $h"), SyntaxError);
  CHECK_THROWS_AS(parse_rule("COPY($, $b, $c) → _ => READ() → $h"), SyntaxError);
  CHECK_THROWS_AS(parse_rule("IF($a, ~, 0) → return ECODE => READ() → $h"), SyntaxError);
  // Nested calls other than equal are rejected.
  CHECK_THROWS_AS(parse_rule("IF(f($a), >, 0) → return ECODE => READ() → $h"), SyntaxError);
}

TEST_CASE("render of the bound-check transformer") {
  auto r = parse_rule("COPY($dst,$in,$len) → _ => IF($len,>,$value) → return ECODE; COPY($dst,$in,$len) → _");
  CHECK(arrows_to_ascii(render_program(r.transformer)) ==
        arrows_to_ascii("IF($len, >, $value) → return ECODE; COPY($dst, $in, $len) → _"));
}

TEST_CASE("render of a single guard") {
  auto p = parse_program("IF($i, <, 0) -> return ECODE");
  CHECK(render_program(p) == "IF($i, <, 0) -> return ECODE");
}

TEST_CASE("both arrow spellings parse to the same rule") {
  auto a = parse_rule("ARRAY($b,$i) → _ => IF($i, <, 0) → return ECODE; ARRAY($b,$i) → _");
  auto b = parse_rule("ARRAY($b,$i) -> _ => IF($i, <, 0) -> return ECODE; ARRAY($b,$i) -> _");
  CHECK(structurally_equal(a, b));
}

TEST_CASE("bundled rules parse, validate and round-trip") {
  auto rules = load_rule_dir(kRulesDir);
  REQUIRE(rules.size() == 6);
  std::set<std::string> names;
  for (const auto& r : rules) {
    CAPTURE(r.name);
    names.insert(r.name);
    auto rendered = render_rule(r);
    auto again = parse_rule(rendered, r.name);
    CHECK(structurally_equal(r, again));
    CHECK(render_rule(again) == rendered);
    auto rep = validate_rule(r);
    for (const auto& f : rep.findings) CHECK(f.severity != Severity::Error);
    CHECK_FALSE(rep.has("UnboundPlaceholder"));
  }
  CHECK(names == std::set<std::string>{"1.1", "1.2", "2.1", "2.2", "3.1", "3.2"});
}

TEST_CASE("variadic rule validates; ciphers are fresh and expand per argument") {
  auto rules = load_rule_dir(kRulesDir);
  const Rule* r12 = nullptr;
  for (const auto& r : rules)
    if (r.name == "1.2") r12 = &r;
  REQUIRE(r12 != nullptr);
  CHECK(r12->fresh.count("ciphers"));
  CHECK(r12->lists.count("args"));
  auto rep = validate_rule(*r12);
  CHECK_FALSE(rep.has("ExpansionMismatch"));
  CHECK_FALSE(rep.has("UnboundPlaceholder"));
}

TEST_CASE("unbound transformer placeholder warns") {
  auto r = parse_rule("COPY($d,$s,$len) → _ => WRITE($ghost) → _; COPY($d,$s,$len) → _");
  auto rep = validate_rule(r);
  CHECK(rep.has("UnboundPlaceholder", "ghost"));
  CHECK_FALSE(rep.clean());
}

TEST_CASE("unused trigger binding is informational") {
  auto r = parse_rule("COPY($d,$s,$len) → _ => READ() → $h");
  auto rep = validate_rule(r);
  CHECK(rep.has("UnusedBinding", "len"));
  for (const auto& f : rep.findings)
    if (f.code == "UnusedBinding") CHECK(f.severity == Severity::Info);
}

TEST_CASE("expansion mismatch between MULMALLOC and MULENC") {
  auto r = parse_rule(
      "SNPRINT($o,$f,$args) → _ => MULMALLOC($args) → $c; MULENC($other, $c) → _; SNPRINT($o,$f,$c) → _");
  CHECK(validate_rule(r).has("ExpansionMismatch"));
}

TEST_CASE("equal is admitted as a guard operand only") {
  auto p = parse_program("IF(equal($h1,$h2), !=, 0) → return ECODE");
  auto& g = std::get<Guard>(p.nodes.at(0));
  CHECK(std::holds_alternative<std::shared_ptr<EqualTerm>>(g.left));
  CHECK_THROWS_AS(parse_program("HASH(equal($a,$b), $h, $n) → _"), SyntaxError);
}

TEST_CASE("rule files: comments, names and blank-line separation") {
  auto rules = parse_rule_file(
      "# first\n# name: a\nREAD() → $h => READ() → $h\n\n# name: b\nWRITE($h) → _ => WRITE($h) → _\n", "x");
  REQUIRE(rules.size() == 2);
  CHECK(rules[0].name == "a");
  CHECK(rules[1].name == "b");
  auto unnamed = parse_rule_file("READ() → $h => READ() → $h\n\nREAD() → $h => READ() → $h\n", "x");
  REQUIRE(unnamed.size() == 2);
  CHECK(unnamed[0].name != unnamed[1].name);
}

TEST_CASE("fuzz: every input parses or raises a library error") {
  std::vector<std::string> seeds;
  for (const auto& r : load_rule_dir(kRulesDir)) seeds.push_back(render_rule(r));
  std::mt19937 rng(20240611);
  int parsed = 0, rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    auto text = oracle::random_rule_text(rng, seeds);
    try {
      auto r = parse_rule(text);
      ++parsed;
      auto again = parse_rule(render_rule(r));
      CHECK(structurally_equal(r, again));
    } catch (const tarepair::Error&) {
      ++rejected;
    }
  }
  CHECK(parsed > 0);
  CHECK(rejected > 0);
}
