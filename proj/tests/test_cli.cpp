#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "support/oracles.hpp"
#include "tarepair/cli.hpp"

using namespace tarepair;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus_case(const std::string& c) { return std::string(TAREPAIR_CORPUS_DIR) + "/cases/" + c; }
std::string rules_dir() { return std::string(TAREPAIR_TEST_DIR) + "/../rules"; }

}  // namespace

TEST_CASE("detect exit codes") {
  auto found = run({"detect", corpus_case("ivw_copy_fig2") + "/ta.c"});
  CHECK(found.code == 1);
  CHECK(found.out.find("ta.c:13: Input Validation Weaknesses [2.1]") != std::string::npos);

  auto dir = oracle::make_temp_dir("clean");
  oracle::spit(dir + "/ok.c", "int add(int a, int b)\n{\n\treturn a + b;\n}\n");
  auto clean = run({"detect", dir + "/ok.c"});
  CHECK(clean.code == 0);

  CHECK(run({"detect", dir + "/missing.c"}).code == 2);
  CHECK(run({"detect", "--rules", dir + "/no-rules", dir + "/ok.c"}).code == 2);
  CHECK(run({"detect"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  fs::remove_all(dir);
}

TEST_CASE("detect JSON lists issues per file") {
  auto r = run({"detect", "--json", corpus_case("ivw_copy_fig2")});
  REQUIRE(r.code == 1);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("total") == 1);
  CHECK(j["files"][0]["issues"][0]["rule_hint"] == "2.1");
  CHECK(j["files"][0]["issues"][0]["line"] == 13);
}

TEST_CASE("external resolver without an endpoint is a configuration error") {
  ::unsetenv("TAREPAIR_MODEL_URL");
  auto dir = oracle::make_temp_dir("ext");
  auto r = run({"repair", "--resolver", "external", "--out", dir, corpus_case("ivw_copy_fig2")});
  CHECK(r.code == 2);
  CHECK_FALSE(r.err.empty());
  fs::remove_all(dir);
}

TEST_CASE("heuristic repair writes patch, source, client and report") {
  auto dir = oracle::make_temp_dir("repair");
  auto r = run({"repair", "--rules", rules_dir(), "--out", dir, corpus_case("ivw_copy_fig2")});
  CHECK(r.code == 0);
  const std::string client = "client_9d1c6a2b-44e0-4f1a-835b-0e72d1942c6f";
  CHECK(fs::exists(dir + "/ta.c"));
  CHECK(fs::exists(dir + "/ta.c.patch"));
  CHECK(fs::exists(dir + "/" + client + ".c"));
  CHECK(fs::exists(dir + "/" + client + ".manifest.json"));
  auto report = nlohmann::json::parse(oracle::slurp(dir + "/report.json"));
  CHECK(report.at("summary").at("clean") == 1);
  CHECK(report.at("resolver") == "heuristic");
  auto patched = oracle::gnu_patch(oracle::slurp(corpus_case("ivw_copy_fig2") + "/ta.c"),
                                   oracle::slurp(dir + "/ta.c.patch"));
  REQUIRE(patched);
  CHECK(*patched == oracle::slurp(dir + "/ta.c"));
  fs::remove_all(dir);
}

TEST_CASE("unresolved placeholders make repair exit 1") {
  auto dir = oracle::make_temp_dir("open");
  auto r = run({"repair", "--out", dir, corpus_case("sm_shallow_unknown")});
  CHECK(r.code == 1);
  auto report = nlohmann::json::parse(oracle::slurp(dir + "/report.json"));
  CHECK(report.at("summary").at("clean") == 0);
  fs::remove_all(dir);
}

TEST_CASE("in-place repair overwrites the input") {
  auto dir = oracle::make_temp_dir("inplace");
  auto src = oracle::slurp(corpus_case("ivw_copy_fig2") + "/ta.c");
  oracle::spit(dir + "/ta.c", src);
  auto r = run({"repair", "--in-place", "--out", dir + "/out", dir + "/ta.c"});
  CHECK(r.code == 0);
  auto now = oracle::slurp(dir + "/ta.c");
  CHECK(now != src);
  CHECK(now.find("if (params[1].memref.size > 64) {") != std::string::npos);
  CHECK(run({"detect", dir + "/ta.c"}).code == 0);
  fs::remove_all(dir);
}

TEST_CASE("gen-client leaves sources alone and writes clients") {
  auto dir = oracle::make_temp_dir("gen");
  auto r = run({"gen-client", "--resolver", "replay", "--fixtures", std::string(TAREPAIR_CORPUS_DIR) + "/fixtures",
                "--out", dir, corpus_case("ivw_copy_void")});
  CHECK(r.code == 0);
  CHECK_FALSE(fs::exists(dir + "/ta.c"));
  bool client = false, manifest = false;
  for (const auto& e : fs::directory_iterator(dir)) {
    auto name = e.path().filename().string();
    if (name.rfind("client_", 0) == 0 && e.path().extension() == ".c") client = true;
    if (name.size() > 14 && name.substr(name.size() - 14) == ".manifest.json") manifest = true;
  }
  CHECK(client);
  CHECK(manifest);
  fs::remove_all(dir);
}

TEST_CASE("eval checks observations against a manifest") {
  auto dir = oracle::make_temp_dir("eval");
  REQUIRE(run({"gen-client", "--out", dir, corpus_case("ivw_copy_fig2")}).code == 0);
  std::string manifest = dir + "/client_9d1c6a2b-44e0-4f1a-835b-0e72d1942c6f.manifest.json";
  oracle::spit(dir + "/good.txt",
               "RESULT I1-1 0x00000000 41\nRESULT I1-2 0x00000000 41\nRESULT I1-3 0xffff0006 -\n");
  oracle::spit(dir + "/bad.txt", "RESULT I1-1 0x00000000 41\nRESULT I1-2 0x00000000 41\nRESULT I1-3 0x00000000 41\n");
  auto good = run({"eval", "--manifest", manifest, "--observations", dir + "/good.txt", "--out", dir + "/v.json"});
  CHECK(good.code == 0);
  CHECK(good.out == "pass\n");
  CHECK(nlohmann::json::parse(oracle::slurp(dir + "/v.json")).at("functional") == "pass");
  auto bad = run({"eval", "--manifest", manifest, "--observations", dir + "/bad.txt"});
  CHECK(bad.code == 1);
  CHECK(bad.out == "fail: I1-3\n");
  CHECK(run({"eval", "--manifest", dir + "/none.json", "--observations", dir + "/good.txt"}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("metrics from a triple and from a counts file") {
  auto r = run({"metrics", "--ni", "89", "--n", "85", "--tp", "81", "--json"});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["rows"][0]["precision"].get<double>() == doctest::Approx(95.29).epsilon(1e-9));
  CHECK(j["rows"][0]["recall"].get<double>() == doctest::Approx(91.01).epsilon(1e-9));

  auto dir = oracle::make_temp_dir("metrics");
  oracle::spit(dir + "/c.json", R"({"kinds":{"UDO":{"NI":35,"N":33,"TP":33},"SM":{"NI":25,"N":29,"TP":25}}})");
  auto f = run({"metrics", "--counts", dir + "/c.json"});
  CHECK(f.code == 0);
  CHECK(f.out.find("UDO") < f.out.find("SM"));
  CHECK(f.out.find("86.21") != std::string::npos);
  oracle::spit(dir + "/bad.json", R"({"kinds":{"X":{"NI":1,"N":1,"TP":2}}})");
  CHECK(run({"metrics", "--counts", dir + "/bad.json"}).code == 2);
  CHECK(run({"metrics"}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("replay outputs match the reviewed goldens byte for byte") {
  auto dir = oracle::make_temp_dir("golden");
  auto r = run({"repair", "--resolver", "replay", "--fixtures", std::string(TAREPAIR_CORPUS_DIR) + "/fixtures", "--out",
                dir, std::string(TAREPAIR_CORPUS_DIR) + "/cases"});
  REQUIRE(r.code == 0);
  int compared = 0;
  fs::path golden = std::string(TAREPAIR_TEST_DIR) + "/golden/corpus";
  for (const auto& e : fs::recursive_directory_iterator(golden)) {
    if (!e.is_regular_file()) continue;
    auto rel = fs::relative(e.path(), golden);
    CAPTURE(rel.string());
    REQUIRE(fs::exists(fs::path(dir) / rel));
    CHECK(oracle::slurp((fs::path(dir) / rel).string()) == oracle::slurp(e.path().string()));
    ++compared;
  }
  CHECK(compared == 36);
  fs::remove_all(dir);
}
