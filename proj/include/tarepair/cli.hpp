#pragma once

// Command-line front end: detect, repair, gen-client, eval, metrics.

#include <iosfwd>
#include <string>
#include <vector>

#include "tarepair/harness.hpp"

namespace tarepair::cli {

struct RunConfig {
  std::vector<std::string> inputs;
  std::string rules_dir;
  std::string classify;
  harness::ResolverMode mode = harness::ResolverMode::Heuristic;
  int max_iters = 3;
  std::string out_dir = "tarepair-out";
  bool in_place = false;
  std::string fixtures;
  bool record = false;  // external mode: store exchanges under `fixtures`
  bool dump_prompts = false;  // replay mode: write prompts of missing fixtures
  bool json = false;
};

struct InputFile {
  std::string path;  // as found on disk
  std::string rel;   // name used in reports and under the output directory
};

// Files and directories (searched recursively for .c files), path-sorted.
std::vector<InputFile> expand_inputs(const std::vector<std::string>& inputs);

std::string default_rules_dir();

// Exit codes: 0 success / nothing found, 1 issues or failures, 2 usage,
// configuration or I/O error.
int cmd_detect(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_repair(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool write_sources = true);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tarepair::cli
