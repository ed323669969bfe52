#include "tarepair/report.hpp"

#include <sstream>

#include "tarepair/text.hpp"

namespace tarepair::report {

nlohmann::json to_json(const detector::Issue& i) {
  return {{"id", i.id},
          {"kind", std::string(detector::to_string(i.kind))},
          {"class", std::string(detector::class_name(i.kind))},
          {"line", i.span.begin.line},
          {"column", i.span.begin.col},
          {"function", i.function},
          {"statement", text::trim(i.statement)},
          {"rule_hint", i.rule_hint},
          {"evidence", i.evidence}};
}

nlohmann::json to_json(const harness::RepairResult& r) {
  nlohmann::json j = {{"issue", to_json(r.issue)},
                      {"rule", r.rule},
                      {"generated", r.generated},
                      {"clean", r.clean},
                      {"iterations", r.iterations},
                      {"static", r.clean ? "clean" : "residual"},
                      {"functional", "not-run"},
                      {"notes", r.notes}};
  if (r.patch) {
    j["resolver"] = r.patch->resolver;
    j["patch"] = text::split_lines(templates::render(r.patch->lines));
  }
  if (!r.error.empty()) j["error"] = {{"code", r.error}, {"message", r.message}};
  nlohmann::json residual = nlohmann::json::array();
  for (const auto& i : r.residual) residual.push_back(to_json(i));
  j["residual"] = residual;
  return j;
}

Summary summarize(const std::vector<FileRepair>& files) {
  Summary s;
  for (const auto& f : files)
    for (const auto& r : f.results) {
      ++s.issues;
      if (r.generated) ++s.generated;
      if (r.clean) ++s.clean;
      else ++s.residual;
    }
  return s;
}

nlohmann::json detection_report(const std::vector<FileDetection>& files) {
  nlohmann::json list = nlohmann::json::array();
  std::size_t total = 0;
  for (const auto& f : files) {
    nlohmann::json issues = nlohmann::json::array();
    for (const auto& i : f.issues) issues.push_back(to_json(i));
    total += f.issues.size();
    nlohmann::json jf = {{"file", f.file}, {"issues", issues}};
    if (!f.error.empty()) jf["error"] = f.error;
    list.push_back(jf);
  }
  return {{"files", list}, {"total", total}};
}

nlohmann::json repair_report(const std::vector<FileRepair>& files, std::string_view resolver, int max_iters) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& f : files) {
    nlohmann::json results = nlohmann::json::array();
    for (const auto& r : f.results) results.push_back(to_json(r));
    nlohmann::json jf = {{"file", f.file}, {"results", results}, {"cases", f.cases}};
    if (!f.client.empty()) jf["client"] = f.client;
    if (!f.error.empty()) jf["error"] = f.error;
    list.push_back(jf);
  }
  Summary s = summarize(files);
  return {{"resolver", std::string(resolver)},
          {"max_iters", max_iters},
          {"files", list},
          {"summary", {{"issues", s.issues}, {"generated", s.generated}, {"clean", s.clean}, {"residual", s.residual}}}};
}

std::string detection_text(const std::vector<FileDetection>& files) {
  std::ostringstream o;
  std::size_t total = 0;
  for (const auto& f : files) {
    if (!f.error.empty()) o << f.file << ": error: " << f.error << "\n";
    for (const auto& i : f.issues)
      o << f.file << ":" << i.span.begin.line << ": " << detector::class_name(i.kind) << " [" << i.rule_hint << "] "
        << text::trim(i.statement) << "\n";
    total += f.issues.size();
  }
  o << total << " issue(s) in " << files.size() << " file(s)\n";
  return o.str();
}

std::string repair_text(const std::vector<FileRepair>& files) {
  std::ostringstream o;
  for (const auto& f : files) {
    if (!f.error.empty()) o << f.file << ": error: " << f.error << "\n";
    for (const auto& r : f.results) {
      o << f.file << ":" << r.issue.span.begin.line << ": " << r.issue_id << " rule " << (r.rule.empty() ? "-" : r.rule)
        << " " << (r.clean ? "clean" : "residual") << " after " << r.iterations << " iteration(s)";
      if (r.patch) o << " via " << r.patch->resolver;
      if (!r.error.empty()) o << " (" << r.error << ": " << r.message << ")";
      o << "\n";
    }
  }
  Summary s = summarize(files);
  o << "generated " << s.generated << ", clean " << s.clean << ", residual " << s.residual << " of " << s.issues
    << " issue(s)\n";
  return o.str();
}

}  // namespace tarepair::report
