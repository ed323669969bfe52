#include <doctest.h>

#include "tarepair/text.hpp"

using namespace tarepair::text;

TEST_CASE("whitespace helpers") {
  CHECK(trim("  a b \n") == "a b");
  CHECK(normalize_ws(" a \t  b\n c ") == "a b c");
  CHECK(strip_ws(" a [ 1 ] ") == "a[1]");
  CHECK(leading_ws("\t  x") == "\t  ");
}

TEST_CASE("top-level split ignores nesting and literals") {
  auto parts = split_top_level("a, f(b, c), \"x,y\", d[1,2]");
  REQUIRE(parts.size() == 4);
  CHECK(parts[1] == "f(b, c)");
  CHECK(parts[2] == "\"x,y\"");
}

TEST_CASE("bracket matching") {
  std::string s = "f(a[(1)], b)";
  CHECK(match_bracket(s, 1) == s.size() - 1);
  CHECK(match_bracket("(", 0) == std::string::npos);
}

TEST_CASE("identifiers skip literals") {
  auto ids = identifiers("x = foo(\"bar baz\", 'q', y_1);");
  CHECK(ids == std::vector<std::string>{"x", "foo", "y_1"});
}

TEST_CASE("expression replacement is token aware") {
  CHECK(replace_expr("buf[len] + len2 + len", "len", "n") == "buf[n] + len2 + n");
  CHECK(replace_expr("f(params[0].memref.buffer, x)", "params[0] .memref.buffer", "c") == "f(c, x)");
}

TEST_CASE("integer literals") {
  CHECK(parse_int("64") == 64);
  CHECK(parse_int("0x40") == 64);
  CHECK(parse_int("010") == 8);
  CHECK(parse_int("64u") == 64);
  CHECK(!parse_int("n").has_value());
}

TEST_CASE("hex round trip and digest") {
  CHECK(to_hex("AZ") == "415a");
  CHECK(from_hex("415a") == "AZ");
  CHECK(!from_hex("4").has_value());
  // FNV-1a 64 of the empty string is the offset basis.
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("keywords") {
  CHECK(is_c_keyword("return"));
  CHECK(!is_c_keyword("buf"));
}
