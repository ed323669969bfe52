#pragma once

// JSON and text renderings of detection and repair results.

#include <string>
#include <vector>

#include <json.hpp>

#include "tarepair/detector.hpp"
#include "tarepair/harness.hpp"

namespace tarepair::report {

nlohmann::json to_json(const detector::Issue& i);
nlohmann::json to_json(const harness::RepairResult& r);

struct FileDetection {
  std::string file;
  std::vector<detector::Issue> issues;
  std::string error;
};

struct FileRepair {
  std::string file;
  std::vector<harness::RepairResult> results;
  std::size_t cases = 0;
  std::string client;  // generated client file name, if any
  std::string error;
};

struct Summary {
  std::size_t issues = 0, generated = 0, clean = 0, residual = 0;
};

Summary summarize(const std::vector<FileRepair>& files);

nlohmann::json detection_report(const std::vector<FileDetection>& files);
nlohmann::json repair_report(const std::vector<FileRepair>& files, std::string_view resolver, int max_iters);

std::string detection_text(const std::vector<FileDetection>& files);
std::string repair_text(const std::vector<FileRepair>& files);

}  // namespace tarepair::report
