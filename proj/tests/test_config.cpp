#include <doctest.h>

#include "tarepair/config.hpp"
#include "tarepair/error.hpp"

using tarepair::ConfigError;
using tarepair::FunctionClassification;
using tarepair::parse_classification;

TEST_CASE("defaults cover the helper functions") {
  FunctionClassification fc;
  CHECK(fc.category("TEE_MemMove") == "copy");
  CHECK(fc.category("memcpy") == "copy");
  CHECK(fc.category("snprintf") == "snprint");
  CHECK(fc.category("TEE_MemCompare") == "compare");
  CHECK(fc.category("enc") == "enc");
  CHECK(fc.category("hash") == "hash");
  CHECK(fc.category("printf").empty());
  CHECK_NOTHROW(fc.check_disjoint());
}

TEST_CASE("patterns match any decimal slot, whitespace-insensitive") {
  FunctionClassification fc;
  CHECK(fc.matches_output("params[0].memref.buffer"));
  CHECK(fc.matches_output("params[ 3 ] . memref.buffer"));
  CHECK(!fc.matches_output("params[i].memref.buffer"));
  CHECK(fc.find_shared("*(params[3].memref.buffer + 10)") == "params[3].memref.buffer");
  CHECK(fc.find_input("x + params[1].value.a").find("params[1]") == 0);
}

TEST_CASE("config file overrides and narrows") {
  auto fc = parse_classification(
      "# project helpers\n"
      "copy = my_copy, memcpy\n"
      "enc = aes_enc\n"
      "shared_mem_pattern = params[3].memref.buffer\n"
      "lower.enc = aes_enc\n");
  CHECK(fc.category("my_copy") == "copy");
  CHECK(fc.category("TEE_MemMove").empty());
  CHECK(fc.category("aes_enc") == "enc");
  CHECK(fc.lower_enc == "aes_enc");
  CHECK(fc.matches_shared("params[3].memref.buffer"));
  CHECK(!fc.matches_shared("params[2].memref.buffer"));
}

TEST_CASE("overlapping function sets are rejected") {
  CHECK_THROWS_AS(parse_classification("copy = f\nhash = f\n"), ConfigError);
}

TEST_CASE("unknown keys and malformed lines are rejected") {
  CHECK_THROWS_AS(parse_classification("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_classification("copy\n"), ConfigError);
}
